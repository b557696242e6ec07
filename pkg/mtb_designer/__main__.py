"""
メインエントリポイント

`python -m mtb_designer` として実行された場合に呼び出されるスクリプトです。
"""

from .core import main

if __name__ == "__main__":
    main()
