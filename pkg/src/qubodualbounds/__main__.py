import sys

from qubodualbounds.cli import main

sys.exit(main())
