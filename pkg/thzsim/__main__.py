import sys

from thzsim.main import main

sys.exit(main())
