import sys

from imfid.cli import main

sys.exit(main())
