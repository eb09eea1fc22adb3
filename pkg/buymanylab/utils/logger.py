import logging
from colorama import init, Fore, Back

init(autoreset=True)


class ColorFormatter(logging.Formatter):
    COLORS = {
        "WARNING": Fore.YELLOW,
        "ERROR": Fore.RED,
        "DEBUG": Fore.BLUE,
        "INFO": Fore.GREEN,
        "CRITICAL": Fore.RED + Back.WHITE,
    }

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname, "")
        if not color:
            return super().format(record)
        # Work on a copy so other handlers see the uncoloured record
        record = logging.makeLogRecord(record.__dict__)
        record.levelname = color + record.levelname
        record.msg = color + str(record.msg)
        return super().format(record)


def add_handlers(log: logging.Logger) -> logging.Logger:
    """Attach a single coloured stream handler to ``log`` unless it already has one."""
    if len(log.handlers) == 0:
        formatter = ColorFormatter(
            "%(levelname)s: %(asctime)-10s [%(module)s]: %(message)s"
        )
        ch = logging.StreamHandler()
        ch.setFormatter(formatter)
        log.addHandler(ch)

    return log


def set_verbosity(verbose: bool) -> None:
    logging.getLogger("buymanylab").setLevel(
        logging.DEBUG if verbose else logging.INFO
    )
