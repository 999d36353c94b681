def reverse(text):
    # slice with a negative step
    return text[::-1]

print(reverse("generated"))
