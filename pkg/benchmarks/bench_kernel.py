"""Benchmark the compiled search kernel against the pure-Python fallback.

Builds a randomized upgrade problem with a configurable number of free
stanzas, compiles it once, and times both kernels over the identical
candidate space.

    python3 benchmarks/bench_kernel.py --bits 16 --repeat 3
"""

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from _gen import rand_document  # noqa: E402

from cudfkit.solver import _kernel_py  # noqa: E402
from cudfkit.solver._compile import compile_problem  # noqa: E402

try:
    from cudfkit.solver import _kernel
except ImportError:
    _kernel = None


def build_problem(bits, seed):
    rng = random.Random(seed)
    while True:
        doc = rand_document(rng, max_names=8, max_versions=3, with_keep=False)
        if len(doc.packages) >= bits:
            break
    packages = doc.packages[:bits]
    doc = type(doc)(packages=packages, request=doc.request)
    costs = {p.key: rng.randint(1, 99) for p in doc.packages}
    return compile_problem(doc, doc.request, costs)


def time_kernel(kernel, problem, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        start = time.perf_counter()
        result = kernel.search(problem)
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--bits", type=int, default=16,
                        help="stanza count (candidate space is 2^bits)")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=1)
    args = parser.parse_args()

    problem = build_problem(args.bits, args.seed)
    space = 1 << len(problem.free_bits)
    print(f"stanzas: {problem.n}, candidates: {space}")

    pure_time, pure_result = time_kernel(_kernel_py, problem, args.repeat)
    rate = space / pure_time
    print(f"pure:     {pure_time:8.3f} s  ({rate:12.0f} candidates/s)")

    if _kernel is None:
        print("compiled: unavailable (extension not built)")
        return
    comp_time, comp_result = time_kernel(_kernel, problem, args.repeat)
    rate = space / comp_time
    print(f"compiled: {comp_time:8.3f} s  ({rate:12.0f} candidates/s)")
    print(f"speedup:  {pure_time / comp_time:.1f}x")
    assert comp_result == pure_result, "kernels disagree"


if __name__ == "__main__":
    main()
