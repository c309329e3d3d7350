"""Allow ``python -m impatience``."""
import sys

from impatience.main import main

sys.exit(main())
