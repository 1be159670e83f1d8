import sys

from cinfty.cli import main

sys.exit(main())
