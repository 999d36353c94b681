# Primality by trial division
def is_prime(n):
    for d in range(2, n):
        if n % d == 0:
            return False
    return True

print([k for k in range(1, 20) if is_prime(k)])
