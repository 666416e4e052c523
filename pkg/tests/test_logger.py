from loguru import logger

from petersson_lab import logger as log


def test_file_sink_keeps_debug_and_stage_tag(tmp_path):
    """ファイルには DEBUG も残り、stage 内の行にだけ [名前] が付くこと"""
    path = tmp_path / "logs" / "run.log"
    log.setup_logger("WARNING", path)
    with log.stage("cartan") as timing:
        log.detail("法 p^3 で総和")
    log.step("段階の外")
    logger.remove()  # ファイルを閉じて書き出しを確定させる

    lines = path.read_text(encoding="utf-8").splitlines()
    inside = [line for line in lines if "法 p^3 で総和" in line]
    outside = [line for line in lines if "段階の外" in line]
    assert len(inside) == 1 and "[cartan]" in inside[0]
    assert len(outside) == 1 and "[cartan]" not in outside[0]
    assert timing["seconds"] >= 0.0


def test_stage_sets_seconds_on_error():
    log.setup_logger("ERROR")
    timing = None
    try:
        with log.stage("local") as timing:
            raise RuntimeError("中断")
    except RuntimeError:
        pass
    assert timing is not None
    assert timing["seconds"] >= 0.0
