def is_palindrome(word):
    w = word.lower()
    i, j = 0, len(w) - 1
    while i < j:
        if w[i] != w[j]:
            return False
        i += 1
        j -= 1
    return True

print(is_palindrome("Level"))
print(is_palindrome("python"))
