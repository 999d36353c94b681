def to_fahrenheit(celsius):
    # F = C * 9/5 + 32
    return celsius * 1.8 + 32

for c in (0, 37, 100):
    print(c, to_fahrenheit(c))
