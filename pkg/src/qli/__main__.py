from qli.cli import main

raise SystemExit(main())
