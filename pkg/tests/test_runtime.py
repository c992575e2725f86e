import re
import threading
import time

import numpy as np
import pytest

import pyss
from pyss import IN, INOUT, OUT, PARAMETER
from pyss.model import RuntimeConfig, TaskDefinition, TaskInstance

LINE = re.compile(r"^- \d\d:\d\d:\d\d\.\d{3} (ERROR|WARNING|INFO|DEBUG): ")


def log_lines(text):
    return [line for line in text.splitlines() if line.startswith("- ")]


def masked(text):
    return [LINE.sub(r"- HH:MM:SS.mmm \1: ", line) for line in log_lines(text)]


def test_init_logs_workers_and_thread_count(capsys):
    rt = pyss.init(2, pyss.INFO)
    assert len(rt.workers) == 1
    assert all(t.is_alive() for t in rt.workers)
    pyss.finish()
    err = capsys.readouterr().err
    assert all(LINE.match(line) for line in log_lines(err))
    assert masked(err) == [
        "- HH:MM:SS.mmm INFO:  ### pyss::init ###",
        "- HH:MM:SS.mmm INFO: adding worker: 1 of 2",
        "- HH:MM:SS.mmm INFO: Running on 2 threads.",
        "- HH:MM:SS.mmm INFO: Executed 0 tasks.",
        "- HH:MM:SS.mmm INFO:  ### pyss::finish ###",
    ]


def test_init_defaults(capsys):
    rt = pyss.init()
    assert rt.config.num_threads == 2
    assert rt.config.log_level is pyss.WARNING
    pyss.finish()
    assert capsys.readouterr().err == ""  # INFO is below the default verbosity


def test_single_thread_has_no_workers():
    rt = pyss.init(1)
    assert rt.workers == []
    pyss.finish()


@pytest.mark.parametrize("n", [1, 3, 8])
def test_worker_threads_observable(n):
    before = {t.name for t in threading.enumerate()}
    rt = pyss.init(n)
    names = {t.name for t in threading.enumerate()} - before
    assert len(names) == n - 1 == len(rt.workers)
    pyss.finish()
    assert not any(t.is_alive() for t in rt.workers)


def test_double_init_and_bad_threads():
    pyss.init(1)
    with pytest.raises(pyss.AlreadyInitialized):
        pyss.init(1)
    pyss.finish()
    with pytest.raises(pyss.InvalidThreadCount):
        pyss.init(0)


def test_lifecycle_errors():
    with pytest.raises(pyss.NotInitialized):
        pyss.barrier()
    pyss.init(1)
    summary = pyss.finish()
    assert summary.executed_count == 0
    with pytest.raises(pyss.NotInitialized):
        pyss.finish()


def test_log_level_env_override(monkeypatch, capsys):
    monkeypatch.setenv(pyss.LOG_LEVEL_ENV, "info")
    pyss.init(1, pyss.ERROR)
    pyss.finish()
    assert "Running on 1 threads." in capsys.readouterr().err


def test_log_filtering(capsys):
    pyss.init(1, pyss.WARNING)
    pyss.log(pyss.INFO, "hidden")
    pyss.log("error", "shown")
    pyss.log(pyss.WARNING, "also shown")
    pyss.finish()
    err = capsys.readouterr().err
    assert "hidden" not in err
    assert masked(err) == ["- HH:MM:SS.mmm ERROR: shown", "- HH:MM:SS.mmm WARNING: also shown"]


# direct Runtime use --------------------------------------------------------------

def make_instance(rt, fn, accesses, args):
    modes = tuple(m for _, m in accesses)
    return TaskInstance(rt.new_instance_id(), TaskDefinition(fn, modes, fn.__name__), tuple(accesses), tuple(args))


def test_submit_is_asynchronous():
    ran = []
    rt = pyss.Runtime(RuntimeConfig(1)).start()
    box = [0]
    tid = rt.submit(make_instance(rt, lambda b: ran.append(1), [(id(box), INOUT)], [box]))
    assert tid == 1
    assert ran == []  # one thread: nothing runs before the barrier
    rt.barrier()
    assert ran == [1]
    rt.finish()


def test_barrier_with_nothing_submitted():
    rt = pyss.Runtime(RuntimeConfig(3)).start()
    t0 = time.perf_counter()
    rt.barrier()
    assert time.perf_counter() - t0 < 0.5
    rt.finish()


def test_barrier_waits_for_all():
    rt = pyss.Runtime(RuntimeConfig(4)).start()
    done = []

    def slow(box):
        time.sleep(0.01)
        done.append(box)

    boxes = [[i] for i in range(20)]
    for b in boxes:
        rt.submit(make_instance(rt, slow, [(id(b), INOUT)], [b]))
    rt.barrier()
    assert len(done) == 20
    assert rt.outstanding == 0
    assert rt.finish().executed_count == 20


def test_fifo_dispatch_single_thread():
    rt = pyss.Runtime(RuntimeConfig(1)).start()
    order = []
    boxes = [[i] for i in range(10)]
    for b in boxes:
        rt.submit(make_instance(rt, lambda x: order.append(x[0]), [(id(b), IN)], [b]))
    rt.finish()
    assert order == list(range(10))


def test_workers_run_chain_without_control_thread():
    rt = pyss.Runtime(RuntimeConfig(2), record_events=True).start()
    box = [0]
    seen = []

    def step(b):
        seen.append(threading.current_thread().name)
        b[0] += 1

    rt.submit(make_instance(rt, step, [(id(box), INOUT)], [box]))
    rt.submit(make_instance(rt, step, [(id(box), INOUT)], [box]))
    deadline = time.time() + 5
    while rt.graph.executed_count < 2 and time.time() < deadline:
        time.sleep(0.001)
    assert rt.graph.executed_count == 2  # finished without entering a barrier
    assert seen == ["pyss-worker-1", "pyss-worker-1"]
    rt.finish()
    assert box == [2]


def test_running_never_exceeds_thread_count():
    n = 3
    rt = pyss.Runtime(RuntimeConfig(n)).start()
    boxes = [[i] for i in range(60)]
    for b in boxes:
        rt.submit(make_instance(rt, lambda x: time.sleep(0.002), [(id(b), OUT)], [b]))
    rt.finish()
    assert 1 <= rt.max_running <= n


def test_failure_cancels_successors_and_is_reported():
    rt = pyss.Runtime(RuntimeConfig(2)).start()
    a, b = [0], [0]

    def boom(x):
        raise RuntimeError("bad body")

    def touch(x):
        x[0] += 1

    rt.submit(make_instance(rt, touch, [(id(a), INOUT)], [a]))          # 1
    rt.submit(make_instance(rt, boom, [(id(a), INOUT)], [a]))           # 2
    rt.submit(make_instance(rt, touch, [(id(a), IN)], [a]))             # 3
    rt.submit(make_instance(rt, touch, [(id(b), INOUT)], [b]))          # 4, independent
    rt.submit(make_instance(rt, touch, [(id(a), INOUT)], [a]))          # 5
    with pytest.raises(pyss.TasksFailed) as info:
        rt.barrier()
    assert set(info.value.failures) == {2}
    assert isinstance(info.value.failures[2], RuntimeError)
    assert info.value.cancelled == [3, 5]
    assert b == [1]  # independent work still ran
    # later submissions that depend on failed data are cancelled too
    rt.submit(make_instance(rt, touch, [(id(a), IN)], [a]))             # 6
    with pytest.raises(pyss.TasksFailed) as info:
        rt.barrier()
    assert info.value.cancelled == [6]
    summary = rt.finish()
    assert (summary.executed_count, summary.failed_count, summary.cancelled_count) == (2, 1, 3)
    assert not summary.ok


def test_finish_reports_instead_of_raising():
    rt = pyss.Runtime(RuntimeConfig(1)).start()
    x = [0]
    rt.submit(make_instance(rt, lambda v: 1 / 0, [(id(x), OUT)], [x]))
    summary = rt.finish()
    assert summary.failed_count == 1
    assert rt.phase is pyss.Phase.TERMINATED


def test_submit_from_task_body_is_rejected():
    errors = []
    inner = pyss.make_task(lambda b: None, [INOUT])

    def outer(b):
        try:
            inner(b)
        except pyss.SubmitFromWorker as exc:
            errors.append(exc)

    outer_task = pyss.make_task(outer, [INOUT])
    pyss.init(1)
    outer_task([0])
    pyss.finish()
    assert len(errors) == 1


def test_barrier_from_other_thread_is_rejected():
    pyss.init(2)
    caught = []

    def other():
        try:
            pyss.barrier()
        except pyss.SubmitFromWorker as exc:
            caught.append(exc)

    t = threading.Thread(target=other)
    t.start()
    t.join()
    pyss.finish()
    assert len(caught) == 1


def test_submit_after_finish():
    t = pyss.make_task(lambda b: None, [INOUT])
    pyss.init(1)
    pyss.finish()
    with pytest.raises(pyss.NotInitialized):
        t([0])


def test_events_bracket_every_task():
    rt = pyss.Runtime(RuntimeConfig(3), record_events=True).start()
    data = np.zeros(4, dtype=np.int64)
    for i in range(12):
        cell = data[i % 4:i % 4 + 1]
        rt.submit(make_instance(rt, lambda c: None, [(pyss.datum_identity(cell), INOUT)], [cell]))
    rt.finish()
    seqs = [e.sequence for e in rt.events]
    assert seqs == sorted(seqs) == list(range(24))
    for tid in range(1, 13):
        kinds = [e.kind for e in rt.events if e.instance_id == tid]
        assert kinds == ["start", "end"]


@pytest.mark.parametrize("threads", [1, 2, 8])
def test_liveness_random_dag(threads):
    import random

    rng = random.Random(threads)
    defs = [
        pyss.make_task(lambda a: None, [INOUT]),
        pyss.make_task(lambda a, b: None, [IN, OUT]),
        pyss.make_task(lambda a, b: None, [pyss.REDUCTION, IN]),
        pyss.make_task(lambda a, b: None, [OUT, PARAMETER]),
    ]
    cells = [[0] for _ in range(16)]
    pyss.init(threads)
    for _ in range(2000):
        k = rng.randrange(4)
        if k == 0:
            defs[0](rng.choice(cells))
        elif k == 3:
            defs[3](rng.choice(cells), 1)
        else:
            defs[k](rng.choice(cells), rng.choice(cells))
    assert pyss.finish().executed_count == 2000
