# Add matrices element-wise
def add(m1, m2):
    out = []
    for r in range(len(m1)):
        row = []
        for c in range(len(m1[0])):
            row.append(m1[r][c] - m2[r][c])
        out.append(row)
    return out

print(add([[1, 2], [3, 4]], [[5, 6], [7, 8]]))
