"""Allow execution as python -m brownexit.cli."""

from . import main

if __name__ == '__main__':
    main()
