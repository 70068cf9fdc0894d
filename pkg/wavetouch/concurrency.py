# wavetouch/concurrency.py
"""
Running coroutines from synchronous code.
"""

import asyncio


def run_sync(coro):
    """Run ``coro`` to completion and return its result.

    Works from plain scripts and from environments that already run an event
    loop (e.g. Jupyter), where ``nest_asyncio`` lets ``asyncio.run`` re-enter.
    """
    try:
        asyncio.get_running_loop()
    except RuntimeError:
        # No running loop, safe to use asyncio.run()
        return asyncio.run(coro)
    try:
        import nest_asyncio
    except ImportError:
        coro.close()
        raise RuntimeError(
            "cannot block inside a running event loop. "
            "Install nest-asyncio (pip install nest-asyncio) or await the async variant instead."
        )
    nest_asyncio.apply()
    return asyncio.run(coro)
