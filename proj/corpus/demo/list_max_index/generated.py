values = [4, 8, 1, 9, 3]
best = 0
for i in range(len(values)):
    if values[i] > values[best]:
        best = i
print(best)
