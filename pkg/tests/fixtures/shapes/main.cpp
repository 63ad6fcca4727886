#include <cstdio>

int main() {
  std::printf("shapes\n");
  return 0;
}
