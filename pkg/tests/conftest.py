def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for res in RESULTS:
        terminalreporter.write_line(res.line())
    passed = sum(r.passed for r in RESULTS)
    terminalreporter.write_line(f"{passed}/{len(RESULTS)} criteria passed")
