import sys

from pointline.cli import main

sys.exit(main())
