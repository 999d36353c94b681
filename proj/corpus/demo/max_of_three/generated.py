# Largest of three numbers
def largest(a, b, c):
    if a >= b and a >= c:
        return a
    elif b >= a and b >= c:
        return b
    return c

print(largest(3, 9, 4))
