from triperiod.cli import main

raise SystemExit(main())
