"""suite：ジョブ設定・キャッシュ・レポート出力・検証スイート"""
