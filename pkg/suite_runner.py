"""
Script-mode runner for the test modules: `python test_x.py` runs every
test function and reports ✅/❌ lines, as pytest would collect them.
"""

import sys
import time
import traceback
from typing import Callable, Dict


def run_suite(title: str, namespace: Dict[str, object]) -> bool:
    tests = [(name, fn) for name, fn in namespace.items()
             if name.startswith('test_') and isinstance(fn, Callable)]
    print(f"🧪 {title}")
    print("=" * 50)

    passed = 0
    failed = 0
    for name, fn in tests:
        started = time.perf_counter()
        try:
            fn()
            print(f"✅ {name} ({time.perf_counter() - started:.2f}s)")
            passed += 1
        except Exception as e:
            print(f"❌ {name} FAILED: {e!r}")
            traceback.print_exc(file=sys.stdout)
            failed += 1

    print(f"\n📊 Test Results:")
    print(f"✅ Passed: {passed}")
    print(f"❌ Failed: {failed}")
    return failed == 0
