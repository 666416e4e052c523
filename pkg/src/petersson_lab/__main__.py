"""python -m petersson_lab で CLI を起動する"""

from .cli import main

main()
