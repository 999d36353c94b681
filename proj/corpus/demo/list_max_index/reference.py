values = [4, 8, 1, 9, 3]
# index of the largest element
print(values.index(max(values)))
