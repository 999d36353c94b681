#!/usr/bin/env python3
"""Reference runner for cgems.

usage: python_runner.py {check|run|coverage} SOURCE

check     parse only; exit 0 when the file compiles, else one diagnostic line on stderr
run       execute the program as __main__
coverage  execute under a line tracer and print
          {"executed_lines": [...], "executable_lines": [...]} on stdout
"""
import ast
import json
import os
import runpy
import sys


def read_source(path):
    with open(path, "rb") as fh:
        return fh.read()


def check(path):
    try:
        compile(read_source(path), path, "exec", ast.PyCF_ONLY_AST)
    except (SyntaxError, ValueError) as exc:
        line = getattr(exc, "lineno", None)
        print(f"{type(exc).__name__}: {exc.msg if hasattr(exc, 'msg') else exc} (line {line})",
              file=sys.stderr)
        return 1
    return 0


def run(path):
    sys.argv = [path]
    try:
        runpy.run_path(path, run_name="__main__")
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        if isinstance(code, int):
            return code
        print(code, file=sys.stderr)
        return 1
    return 0


def executable_lines(code):
    lines = set()
    stack = [code]
    while stack:
        co = stack.pop()
        for _, _, line in co.co_lines():
            if line is not None and line > 0:
                lines.add(line)
        stack.extend(c for c in co.co_consts if hasattr(c, "co_code"))
    return lines


def coverage(path):
    code = compile(read_source(path), path, "exec")
    executable = executable_lines(code)
    target = os.path.abspath(path)
    executed = set()

    def tracer(frame, event, arg):
        if os.path.abspath(frame.f_code.co_filename) != target:
            return None
        if event == "line":
            executed.add(frame.f_lineno)
        return tracer

    real_stdout = sys.stdout
    status = 0
    with open(os.devnull, "w") as sink:
        sys.stdout = sink
        sys.settrace(tracer)
        try:
            exec(code, {"__name__": "__main__", "__file__": path})
        except SystemExit as exc:
            status = 0 if exc.code in (None, 0) else 1
        finally:
            sys.settrace(None)
            sys.stdout = real_stdout
    print(json.dumps({"executed_lines": sorted(executed),
                      "executable_lines": sorted(executable)}))
    return status


def main(argv):
    if len(argv) != 3 or argv[1] not in ("check", "run", "coverage"):
        print(__doc__, file=sys.stderr)
        return 2
    mode, path = argv[1], argv[2]
    return {"check": check, "run": run, "coverage": coverage}[mode](path)


if __name__ == "__main__":
    sys.exit(main(sys.argv))
