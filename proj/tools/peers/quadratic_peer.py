#!/usr/bin/env python3
"""Example objective peer: reads JSON-lines requests on stdin and answers
each with 1/2 |theta|^2 per point.

Request:  {"id": 1, "thetas": [[...], [...]]}
Response: {"id": 1, "losses": [..., ...]}   or   {"id": 1, "error": "..."}
"""

import json
import sys


def main():
    for line in sys.stdin:
        request = json.loads(line)
        try:
            losses = [0.5 * sum(x * x for x in theta) for theta in request["thetas"]]
            reply = {"id": request["id"], "losses": losses}
        except Exception as exc:  # report, keep serving
            reply = {"id": request.get("id"), "error": str(exc)}
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
