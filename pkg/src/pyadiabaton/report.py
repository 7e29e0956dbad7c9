"""Machine-readable error records for failed commands."""
import os

from . import provenance


def build_error_record(err, root_directory=None):
    """
    {"errors": [...], "context": {...}} for err and the exceptions chained to
    it, outermost first. Each backtrace lists frames innermost first.
    """
    root = root_directory or os.getcwd()
    return dict(errors=_build_errors(err, root),
                context=provenance.run_context(root))


def _build_errors(err, root):
    out = []
    seen = set()
    while err is not None and id(err) not in seen:
        seen.add(id(err))
        out.append(_build_error(err, root))
        err = err.__cause__ or err.__context__
    return out


def _build_error(err, root):
    return dict(type=err.__class__.__name__,
                code=getattr(err, "code", None),
                message=str(err),
                backtrace=_build_backtrace(err.__traceback__, root))


def _build_backtrace(tb, root):
    backtrace = []
    while tb is not None:
        frame = tb.tb_frame
        if not frame.f_locals.get("__traceback_hide__"):
            backtrace.insert(0, dict(file=_clean_filename(frame.f_code.co_filename, root),
                                     function=frame.f_code.co_name,
                                     line=tb.tb_lineno))
        tb = tb.tb_next
    return backtrace


def _clean_filename(s, root):
    if "/lib/python" in s and "/site-packages/" in s:
        needed = "/site-packages/"
        return "/SITE_PACKAGES/" + s[s.find(needed) + len(needed):]
    return s.replace(root, "/PROJECT_ROOT")
