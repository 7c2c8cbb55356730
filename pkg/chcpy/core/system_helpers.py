import logging
import atexit
import psutil

LOG_LEVEL = logging.INFO
logger = logging.getLogger()
logger.setLevel(LOG_LEVEL)
HANDLERS = []

logging.basicConfig(level=LOG_LEVEL,
                    format='%(asctime)s %(name)-12s %(levelname)-8s %(message)s',
                    datefmt='%m-%d %H:%M:%S')

_cleanup_registered = False


def get_logger(name: str):
    """
    Returns a logger with the given name, with any registered extra handlers attached.
    :param name:
    :return:
    """
    logger = logging.getLogger(name)

    for handler in HANDLERS:
        logger.addHandler(handler)

    return logger


def set_log_level(level: int):
    logging.getLogger().setLevel(level)


def kill_process_tree(pid: int) -> int:
    """
    Kills the process with the given pid and all of its descendants.
    :param pid:
    :return: the number of processes killed
    """
    try:
        parent = psutil.Process(pid)
        processes = parent.children(recursive=True) + [parent]
    except psutil.NoSuchProcess:
        return 0

    killed = 0
    for p in processes:
        try:
            p.kill()
            killed += 1
        except psutil.NoSuchProcess:
            pass
    return killed


def cleanup():
    logger = get_logger(__name__)
    leftover = psutil.Process().children(recursive=False)
    if leftover:
        logger.info('Killing {} solver processes still running at exit'.format(len(leftover)))
        for p in leftover:
            kill_process_tree(p.pid)
    else:
        logger.debug('No solver processes left at exit')


def register_cleanup():
    global _cleanup_registered
    if not _cleanup_registered:
        atexit.register(cleanup)
        _cleanup_registered = True
