"""``python -m sharpconst``."""

import sys

from .cli import main

sys.exit(main())
