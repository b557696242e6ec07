"""
dataパッケージ

静的データファイル（実験設定のプリセット等）を格納するパッケージです。
"""
