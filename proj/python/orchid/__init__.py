"""Python bindings for the orchid context-orchestration core."""

import json as _json

from . import _orchid
from ._orchid import Error, Server, __version__, check_archive, escape_value, template_names, template_placeholders, template_text

__all__ = [
    "Error",
    "Server",
    "Workspace",
    "__version__",
    "check_archive",
    "escape_value",
    "parse_mentions",
    "render",
    "template_names",
    "template_placeholders",
    "template_text",
]


def render(template, **params):
    """Renders a stored template. Returns (text, digest)."""
    return _orchid.render(template, {k: str(v) for k, v in params.items()})


def parse_mentions(text, names):
    """names: iterable of (name, id, is_persona)."""
    return _json.loads(_orchid.parse_mentions(text, [tuple(n) for n in names]))


class Workspace:
    """An in-memory workspace with a scripted provider."""

    def __init__(self, seed=None):
        self._ws = _orchid.Workspace(seed)

    @property
    def home_id(self):
        return self._ws.home_id()

    @property
    def me_id(self):
        return self._ws.me_id()

    def create_document(self, kind, title, paragraphs=(), default_persona=None):
        blocks = [{"kind": "Paragraph", "text": p} for p in paragraphs]
        return _json.loads(self._ws.create_document(kind, title, _json.dumps(blocks), default_persona))

    def get_document(self, doc_id):
        return _json.loads(self._ws.get_document(doc_id))

    def list_documents(self, kind=None, title_prefix=""):
        return _json.loads(self._ws.list_documents(kind, title_prefix))

    def append_paragraph(self, doc_id, revision, text):
        return _json.loads(self._ws.append_paragraph(doc_id, revision, text))

    def delete_document(self, doc_id):
        self._ws.delete_document(doc_id)

    def submit(self, kind, prompt="", host_page=None, selection=None, temperature="Balanced", anchor_block=None):
        request = {
            "kind": kind,
            "prompt": prompt,
            "host_page": host_page,
            "selection": selection,
            "temperature": temperature,
            "anchor_block": anchor_block,
        }
        return _json.loads(self._ws.submit(_json.dumps(request)))

    def resolve(self, kind, prompt="", host_page=None, selection=None):
        request = {"kind": kind, "prompt": prompt, "host_page": host_page, "selection": selection}
        return _json.loads(self._ws.resolve(_json.dumps(request)))

    def poll(self, job):
        return _json.loads(self._ws.poll(job))

    def wait(self, job, timeout=5.0):
        return _json.loads(self._ws.wait(job, timeout))

    def cancel(self, job):
        return _json.loads(self._ws.cancel(job))

    def block_action(self, block, action):
        return _json.loads(self._ws.block_action(block, action))

    def provenance(self, job):
        return _json.loads(self._ws.provenance(job))

    def execute_goal(self, objective, temperature="Balanced"):
        return _json.loads(self._ws.execute_goal(objective, temperature))

    def start_task(self, task):
        return _json.loads(self._ws.start_task(task))

    def generate_task_persona(self, task):
        return _json.loads(self._ws.generate_task_persona(task))

    def do_task(self, task, temperature="Balanced"):
        return _json.loads(self._ws.do_task(task, temperature))

    def set_response(self, template, response, digest="*"):
        self._ws.set_response(template, response, digest)

    def stall(self):
        self._ws.stall()

    def release(self):
        self._ws.release()

    @property
    def provider_calls(self):
        return self._ws.provider_calls()

    def export_archive(self):
        return self._ws.export_archive()

    def import_archive(self, data):
        self._ws.import_archive(data)

    def audit(self):
        return [_json.loads(line) for line in self._ws.audit_lines()]
