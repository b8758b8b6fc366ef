#!/usr/bin/env python3
# Copyright 2026 The decayprobe Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Minimal runner speaking the sandbox JSON protocol. Test fixture only."""

import ast
import builtins
import json
import signal
import sys

_DENIED = {"open", "__import__", "eval", "exec", "compile", "input", "breakpoint",
           "exit", "quit", "help", "globals", "locals", "vars", "memoryview"}


class _Timeout(Exception):
    pass


def _on_alarm(signum, frame):
    raise _Timeout()


def _first_function(code):
    for node in ast.parse(code).body:
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            return node.name
    return None


def _encode(value):
    try:
        return json.dumps(value)
    except (TypeError, ValueError):
        return repr(value)


def main():
    try:
        request = json.loads(sys.stdin.read())
        code = request["code"]
        cases = request["cases"]
        timeout = float(request.get("per_case_timeout", 5.0))
        entry = request.get("entrypoint") or None
    except Exception as e:  # malformed request
        print(f"bad request: {e}", file=sys.stderr)
        json.dump({"per_case": [], "harness_ok": False}, sys.stdout)
        return 1

    safe = {k: v for k, v in vars(builtins).items() if k not in _DENIED}
    namespace = {"__builtins__": safe, "__name__": "candidate"}
    per_case = []

    def all_error(message):
        return [{"status": "error", "actual": None, "message": message} for _ in cases]

    signal.signal(signal.SIGALRM, _on_alarm)
    try:
        entry = entry or _first_function(code)
        signal.setitimer(signal.ITIMER_REAL, timeout)
        try:
            exec(compile(code, "<candidate>", "exec"), namespace)
        finally:
            signal.setitimer(signal.ITIMER_REAL, 0)
        fn = namespace.get(entry) if entry else None
        if not callable(fn):
            per_case = all_error("no entry point")
    except _Timeout:
        per_case = [{"status": "timeout", "actual": None, "message": "definition timed out"}
                    for _ in cases]
    except BaseException as e:  # noqa: BLE001 - candidate failure
        per_case = all_error(f"{type(e).__name__}: {e}")

    if not per_case:
        for case in cases:
            try:
                args = json.loads(case["input"])
                expected = json.loads(case["expected"])
            except Exception as e:
                print(f"bad case: {e}", file=sys.stderr)
                json.dump({"per_case": [], "harness_ok": False}, sys.stdout)
                return 1
            signal.setitimer(signal.ITIMER_REAL, timeout)
            try:
                result = fn(*args)
                signal.setitimer(signal.ITIMER_REAL, 0)
                if isinstance(result, tuple):
                    result = list(result)
                status = "pass" if result == expected else "fail"
                per_case.append({"status": status, "actual": _encode(result), "message": ""})
            except _Timeout:
                per_case.append({"status": "timeout", "actual": None,
                                 "message": f"exceeded {timeout:g}s"})
            except BaseException as e:  # noqa: BLE001
                signal.setitimer(signal.ITIMER_REAL, 0)
                per_case.append({"status": "error", "actual": None,
                                 "message": f"{type(e).__name__}: {e}"})

    json.dump({"per_case": per_case, "harness_ok": True}, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
