import sys

from exoretarget.io.cli import main

sys.exit(main())
