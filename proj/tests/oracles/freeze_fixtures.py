"""Freeze reference metric values for the fixture snippets.

Run once; the output is checked in and the C++ tests compare against it.

    python3 tests/oracles/freeze_fixtures.py > tests/fixtures/metric_oracles.json

Oracles:
  raw metrics        radon.raw.analyze (radon 6.0.1)
  sequence ratio     difflib.SequenceMatcher on characters
  edits              difflib line opcodes
  BLEU               nltk sentence_bleu, uniform weights of order min(4, |hyp|, |ref|), no smoothing
  ROUGE-1/2/L        written out below from the textbook definitions
  Halstead           the tokenize module, same operator/operand convention as the library
  MI                 the formula applied to the values above
  cyclomatic         radon.complexity.cc_visit is recorded for reference only; the lexical
                     count is derived from tokenize + ast line ranges
"""

import ast
import difflib
import io
import json
import keyword
import math
import sys
import tokenize
import warnings
from collections import Counter

import radon
from radon.complexity import cc_visit
from radon.raw import analyze
from nltk.translate.bleu_score import sentence_bleu

warnings.filterwarnings("ignore")

KEYWORDS = set(keyword.kwlist) - {"True", "False", "None"}
DECISIONS = {"if", "elif", "for", "while", "except", "assert", "and", "or"}
CLOSING = {")", "]", "}"}


def tokens(src):
    return list(tokenize.generate_tokens(io.StringIO(src).readline))


def halstead(src):
    ops, opnds = Counter(), Counter()
    prev = None
    for t in tokens(src):
        if t.type == tokenize.OP:
            if t.string not in CLOSING:
                ops[t.string] += 1
        elif t.type == tokenize.NAME:
            if t.string in KEYWORDS:
                ops[t.string] += 1
            elif not (prev is not None and prev.type == tokenize.NAME and prev.string in ("def", "class")):
                opnds[t.string] += 1
        elif t.type in (tokenize.NUMBER, tokenize.STRING):
            opnds[t.string] += 1
        if t.type not in (tokenize.NL, tokenize.COMMENT):
            prev = t
    n1, n2 = len(ops), len(opnds)
    N1, N2 = sum(ops.values()), sum(opnds.values())
    vocab, length = n1 + n2, N1 + N2
    volume = length * math.log2(vocab) if vocab > 0 else 0.0
    difficulty = (n1 / 2.0) * (N2 / n2) if n2 > 0 else 0.0
    effort = difficulty * volume
    return {
        "n1": n1, "n2": n2, "N1": N1, "N2": N2,
        "vocabulary": vocab, "length": length, "volume": volume,
        "difficulty": difficulty, "effort": effort, "time": effort / 18.0, "bugs": volume / 3000.0,
    }


def lexical_cyclomatic(src):
    toks = tokens(src)
    blocks = []
    for node in ast.walk(ast.parse(src)):
        if isinstance(node, (ast.FunctionDef, ast.ClassDef)):
            blocks.append([node.lineno, node.end_lineno, 1])
    module = 1
    for t in toks:
        if t.type == tokenize.NAME and t.string in DECISIONS:
            line = t.start[0]
            inner = None
            for b in blocks:
                if b[0] <= line <= b[1] and (inner is None or b[0] >= inner[0]):
                    inner = b
            if inner is None:
                module += 1
            else:
                inner[2] += 1
    total = sum(b[2] for b in blocks) + (module - 1)
    if blocks:
        aggregate = sum(b[2] for b in blocks) / len(blocks)
    else:
        aggregate = float(module)
    return {"total": total, "aggregate": aggregate, "blocks": len(blocks)}


def mi(raw, hal, total_cc):
    ratio = (raw.comments + raw.multi) / raw.loc if raw.loc > 0 else 0.0
    ratio = min(max(ratio, 0.0), 1.0)
    v = max(hal["volume"], 1.0)
    sloc = max(raw.sloc, 1)
    value = 171 - 5.2 * math.log(v) - 0.23 * total_cc - 16.2 * math.log(sloc) + 50 * math.sin(math.sqrt(2.4 * ratio))
    return min(max(100.0 * value / 171.0, 0.0), 100.0)


def ngrams(words, n):
    return Counter(tuple(words[i:i + n]) for i in range(len(words) - n + 1))


def lcs(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table[-1][-1]


def score(overlap, hyp_units, ref_units):
    p = 100.0 * overlap / hyp_units if hyp_units else 0.0
    r = 100.0 * overlap / ref_units if ref_units else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return {"precision": p, "recall": r, "f1": f}


def rouge(hyp, ref):
    h, r = hyp.split(), ref.split()
    out = {}
    for name, n in (("rouge1", 1), ("rouge2", 2)):
        hc, rc = ngrams(h, n), ngrams(r, n)
        overlap = sum(min(c, rc[g]) for g, c in hc.items())
        out[name] = score(overlap, max(len(h) - n + 1, 0), max(len(r) - n + 1, 0))
    out["rougeL"] = score(lcs(h, r), len(h), len(r))
    return out


def bleu(hyp, ref):
    h, r = hyp.split(), ref.split()
    order = min(4, len(h), len(r))
    if order == 0:
        return 0.0
    return 100.0 * sentence_bleu([r], h, weights=tuple([1.0 / order] * order))


def edits(gen, corrected):
    sm = difflib.SequenceMatcher(None, gen.splitlines(), corrected.splitlines())
    count = 0
    for tag, i1, i2, j1, j2 in sm.get_opcodes():
        if tag == "insert":
            count += j2 - j1
        elif tag == "delete":
            count += i2 - i1
        elif tag == "replace":
            count += max(i2 - i1, j2 - j1)
    return count


def cosine_deg(a, b):
    ca, cb = Counter(a.split()), Counter(b.split())
    dot = sum(ca[w] * cb[w] for w in ca)
    na = math.sqrt(sum(v * v for v in ca.values()))
    nb = math.sqrt(sum(v * v for v in cb.values()))
    if na == 0 or nb == 0:
        return 90.0
    return math.degrees(math.acos(min(max(dot / (na * nb), 0.0), 1.0)))


FIXTURES = [
    ("assign", "a = b + c\n", "a = b + c\n"),
    ("hello", "print('hello world')\n", "print(\"Hello, world!\")\n"),
    ("add_function",
     "def add(a, b):\n    return a + b\n\nprint(add(2, 3))\n",
     "def add(x, y):\n    \"\"\"Return the sum.\"\"\"\n    return x + y\n\nprint(add(2, 3))\n"),
    ("factorial",
     "# compute factorial\ndef factorial(n):\n    if n <= 1:\n        return 1\n    return n * factorial(n - 1)\n\nprint(factorial(5))\n",
     "def factorial(n):\n    result = 1\n    for i in range(2, n + 1):\n        result *= i\n    return result\n\nprint(factorial(5))\n"),
    ("fizzbuzz",
     "for i in range(1, 16):\n    if i % 15 == 0:\n        print('FizzBuzz')\n    elif i % 3 == 0:\n        print('Fizz')\n    elif i % 5 == 0:\n        print('Buzz')\n    else:\n        print(i)\n",
     "for i in range(1, 16):\n    out = ''\n    if i % 3 == 0:\n        out += 'Fizz'\n    if i % 5 == 0:\n        out += 'Buzz'\n    print(out or i)\n"),
    ("docstring_module",
     "\"\"\"Utility module.\n\nComputes simple statistics.\n\"\"\"\n\n\ndef mean(values):\n    return sum(values) / len(values)\n",
     "def mean(values):\n    # arithmetic mean\n    return sum(values) / len(values)\n"),
    ("class_counter",
     "class Counter:\n    def __init__(self):\n        self.count = 0\n\n    def increment(self, step=1):\n        self.count += step\n        return self.count\n\n\nc = Counter()\nc.increment()\nprint(c.count)\n",
     "class Counter:\n    def __init__(self, start=0):\n        self.count = start\n\n    def increment(self):\n        self.count += 1\n\n\nc = Counter()\nc.increment()\nprint(c.count)\n"),
    ("boolean_logic",
     "def check(a, b, c):\n    if a and b or c:\n        return True\n    while a > 0 and not b:\n        a -= 1\n    return False\n",
     "def check(a, b, c):\n    return (a and b) or c\n"),
    ("try_except",
     "def parse(text):\n    try:\n        return int(text)\n    except ValueError:\n        return None\n    except TypeError:\n        return None\n",
     "def parse(text):\n    try:\n        return int(text)\n    except (ValueError, TypeError):\n        return None\n"),
    ("comments_heavy",
     "# Read numbers\n# and print their total\nnumbers = [1, 2, 3]  # the data\ntotal = 0\n# loop\nfor n in numbers:\n    total += n\nprint(total)\n",
     "numbers = [1, 2, 3]\nprint(sum(numbers))\n"),
    ("semicolons",
     "x = 1; y = 2; z = x + y\nprint(z)\n",
     "x = 1\ny = 2\nprint(x + y)\n"),
    ("list_comprehension",
     "squares = [x * x for x in range(10) if x % 2 == 0]\nprint(squares)\n",
     "squares = []\nfor x in range(10):\n    if x % 2 == 0:\n        squares.append(x * x)\nprint(squares)\n"),
    ("continuation",
     "total = 1 + \\\n    2 + \\\n    3\nvalues = [\n    1,\n\n    2,\n]\nprint(total, values)\n",
     "total = 6\nvalues = [1, 2]\nprint(total, values)\n"),
    ("nested_functions",
     "def outer(n):\n    def inner(m):\n        if m > 0:\n            return m\n        return -m\n    return inner(n) + 1\n\nprint(outer(-3))\n",
     "def outer(n):\n    return abs(n) + 1\n\nprint(outer(-3))\n"),
    ("while_loop",
     "n = 10\nsteps = 0\nwhile n != 1:\n    if n % 2 == 0:\n        n = n // 2\n    else:\n        n = 3 * n + 1\n    steps += 1\nprint(steps)\n",
     "def collatz(n):\n    steps = 0\n    while n != 1:\n        n = n // 2 if n % 2 == 0 else 3 * n + 1\n        steps += 1\n    return steps\n\nprint(collatz(10))\n"),
    ("string_ops",
     "s = 'racecar'\nis_pal = s == s[::-1]\nprint('palindrome' if is_pal else 'not palindrome')\n",
     "def is_palindrome(s):\n    return s == s[::-1]\n\nprint(is_palindrome('racecar'))\n"),
    ("multiline_string_assign",
     "text = \"\"\"first line\nsecond line\"\"\"\nlines = text.split('\\n')\nprint(len(lines))\n",
     "text = 'first line\\nsecond line'\nprint(len(text.splitlines()))\n"),
    ("assert_lambda",
     "square = lambda v: v * v\nassert square(3) == 9\nassert square(-2) == 4 or False\nprint('ok')\n",
     "def square(v):\n    return v * v\n\nassert square(3) == 9\nprint('ok')\n"),
    ("blank_lines",
     "\n\nimport math\n\n\nradius = 2.5\n\narea = math.pi * radius ** 2\n\nprint(round(area, 2))\n\n",
     "import math\nradius = 2.5\nprint(round(math.pi * radius ** 2, 2))\n"),
    ("bubble_sort",
     "def bubble_sort(items):\n    n = len(items)\n    for i in range(n):\n        for j in range(0, n - i - 1):\n            if items[j] > items[j + 1]:\n                items[j], items[j + 1] = items[j + 1], items[j]\n    return items\n\n\nprint(bubble_sort([5, 2, 9, 1]))\n",
     "def bubble_sort(items):\n    items = list(items)\n    for i in range(len(items)):\n        swapped = False\n        for j in range(len(items) - i - 1):\n            if items[j] > items[j + 1]:\n                items[j], items[j + 1] = items[j + 1], items[j]\n                swapped = True\n        if not swapped:\n            break\n    return items\n\n\nprint(bubble_sort([5, 2, 9, 1]))\n"),
]


def freeze(name, gen, ref):
    raw = analyze(gen)
    hal = halstead(gen)
    cyc = lexical_cyclomatic(gen)
    radon_blocks = [{"name": b.name, "complexity": b.complexity} for b in cc_visit(gen)]
    return {
        "name": name,
        "generated": gen,
        "reference": ref,
        "raw": {
            "loc": raw.loc, "lloc": raw.lloc, "sloc": raw.sloc, "comments": raw.comments,
            "single_comments": raw.single_comments, "multi": raw.multi, "blank": raw.blank,
        },
        "halstead": hal,
        "cyclomatic": cyc,
        "radon_cc_blocks": radon_blocks,
        "mi": mi(raw, hal, cyc["total"]),
        "sequence_ratio": difflib.SequenceMatcher(None, gen, ref).ratio(),
        "edits": edits(gen, ref),
        "bleu": bleu(gen, ref),
        "rouge": rouge(gen, ref),
        "cosine_deg": cosine_deg(gen, ref),
    }


def main():
    out = {
        "generator": "tests/oracles/freeze_fixtures.py",
        "python": sys.version.split()[0],
        "radon": radon.__version__,
        "fixtures": [freeze(*f) for f in FIXTURES],
    }
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
