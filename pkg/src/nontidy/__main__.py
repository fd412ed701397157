import sys

from nontidy.cli import main

sys.exit(main())
