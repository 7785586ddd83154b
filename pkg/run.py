"""
Development Server Runner
"""
import logging
import os
import sys

import uvicorn

from config import HOST, LOG_LEVEL, PORT

if __name__ == "__main__":
    # Fix Windows encoding
    if sys.platform == "win32":
        os.environ['PYTHONIOENCODING'] = 'utf-8'

    logging.basicConfig(level=LOG_LEVEL.upper(), format="%(levelname)s %(name)s: %(message)s")

    # Run without reload to avoid multiprocessing issues
    uvicorn.run(
        "main:app",
        host=HOST,
        port=PORT,
        reload=False,
        log_level=LOG_LEVEL
    )
