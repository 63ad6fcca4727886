class Square:
    side = 1

    def area(self):
        return self.side * self.side


def main():
    print(Square(3).area())
