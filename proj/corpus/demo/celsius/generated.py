def to_fahrenheit(c):
    return c * 9 / 5 + 32

for c in (0, 37, 100):
    print(c, to_fahrenheit(c))
