"""
結果テーブル出力モジュール

CSV への書き出し (同じ入力からはバイト単位で同一のファイル) と、
tabulate によるコンソール用プレビューを提供します。
"""

import os

import pandas as pd
from tabulate import tabulate

FLOAT_FORMAT = "%.17g"
PREVIEW_ROWS = 20


def write_csv(df: pd.DataFrame, path: str) -> str:
    """ヘッダ行付きで CSV を書き出し、書き出したパスを返します。"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        df.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def format_preview(df: pd.DataFrame, max_rows: int = PREVIEW_ROWS) -> str:
    """先頭 max_rows 行の表形式プレビュー"""
    if df.empty:
        return tabulate([], headers=list(df.columns), tablefmt="github")
    head = df.head(max_rows)
    text = tabulate(head, headers="keys", tablefmt="github", showindex=False, floatfmt=".6g")
    if len(df) > max_rows:
        text += f"\n... ({len(df) - max_rows} more rows)"
    return text
