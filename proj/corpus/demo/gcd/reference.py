def gcd(a, b):
    # Euclid's algorithm
    if b == 0:
        return a
    return gcd(b, a % b)

print(gcd(48, 18))
