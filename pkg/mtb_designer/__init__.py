"""
mtb-designer パッケージ

非線形シュレディンガー(NLS)ファイバ通信路向けに、時間広がりが最小となる
時間制限パルス(MTB パルス)を設計し、それを用いたエネルギー変調リンクを
評価するための数値計算ツールキットです。
"""
