import pytest
from fastapi.testclient import TestClient

from annokit.prompting import EncoderEmbedder, cosine
from annokit.engine.encoder_client import EncoderClient, StubEncoderServer
from annokit.service.app import create_app
from annokit.store import AnnotationStore


class ScriptedPromptClient:
    """query() returns a canned tag string per target token count."""

    def __init__(self):
        self.prompts = []

    def query(self, prompt):
        self.prompts.append(prompt)
        from annokit.prompting import target_sentence_of

        n = len(target_sentence_of(prompt).split())
        return "`` " + " ".join(["B-PER"] + ["O"] * (n - 1)) + " ''"


def tagging_task_file(n=4):
    sentences = [f"pfn{i} pln{i} verb{i}" for i in range(n)]
    return {
        "data": {
            "source": sentences,
            "question": [["Highlight the person."] for _ in sentences],
            "result": [[{"result": []}] for _ in sentences],
            "done": [0] * n,
        },
        "format": [{"type": "selection", "properties": {"contents": ["PER"]}}],
    }


@pytest.fixture
def prompt_client():
    return ScriptedPromptClient()


@pytest.fixture
def client(prompt_client):
    app = create_app(
        store=AnnotationStore(":memory:"),
        client_factory=lambda cfg: prompt_client,
    )
    with TestClient(app) as c:
        c.app = app
        yield c


def auth(token):
    return {"Authorization": f"Bearer {token}"}


def test_prompt_backend_suggests_after_first_exemplar(client, prompt_client):
    client.post("/users", json={"name": "alice", "password": "pw", "role": "administrator"})
    admin = client.post("/login", json={"name": "alice", "password": "pw"}).json()["token"]
    client.post("/users", json={"name": "bob", "password": "pw", "role": "annotator"})
    bob = client.post("/login", json={"name": "bob", "password": "pw"}).json()["token"]

    body = dict(tagging_task_file())
    body.update(
        backend="prompt",
        backend_config={
            "task_map": [{"component": 0, "task_id": "entity"}],
            "prompt": {"task_name": "entities-recognition", "n_examples": 2,
                       "strategy": "random", "seed": 0},
        },
    )
    task_id = client.post("/tasks", json=body, headers=auth(admin)).json()["task_id"]
    client.post(f"/tasks/{task_id}/assign", json={"annotator": "bob"}, headers=auth(admin))

    # no exemplars yet: no suggestion
    served = client.get(f"/tasks/{task_id}/next", headers=auth(bob)).json()
    assert served["suggestion"] is None
    client.post(f"/tasks/{task_id}/annotations",
                json={"instance_index": 0, "results": [[[0, 9, "PER"]]]},
                headers=auth(bob))

    served = client.get(f"/tasks/{task_id}/next", headers=auth(bob)).json()
    envelope = served["suggestion"]
    assert envelope["backend"] == "prompt"
    assert envelope["provenance"].startswith("prompt-")
    # scripted completion tags the first token as PER -> one labeled span
    spans = envelope["results"][0]
    assert spans and spans[0][2] == "PER"
    assert "Given the sentence ``" in prompt_client.prompts[-1]
    assert prompt_client.prompts[-1].endswith("are")


def test_encoder_embedder_deterministic_similarity():
    with StubEncoderServer(dim=12) as server:
        embedder = EncoderEmbedder(
            EncoderClient(port=server.server_address[1]), dim=12
        )
        a1 = embedder.embed("hello world")
        a2 = embedder.embed("hello world")
        b = embedder.embed("totally different text")
        assert cosine(a1, a2) == pytest.approx(1.0)
        assert cosine(a1, b) != pytest.approx(1.0)
