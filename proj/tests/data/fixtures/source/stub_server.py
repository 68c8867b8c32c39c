#!/usr/bin/env python3
"""Local stand-in for the MediaWiki, pageviews and chat-completions APIs.

Used once to record the replay fixtures under tests/data/replay with
`cruciverba --record`. Answers come from the hand-authored files next to
this script.

    python3 stub_server.py 8765
"""
import json
import pathlib
import re
import sys
import urllib.parse
from http.server import BaseHTTPRequestHandler, HTTPServer

HERE = pathlib.Path(__file__).resolve().parent
WIKI = HERE / "wiki"
RESPONSES = json.loads((HERE / "llm" / "responses.json").read_text(encoding="utf-8"))

STYLE_MARKERS = [
    ("sintagma nominale senza determinante", "bare_np"),
    ("articolo determinativo", "definite_dp"),
    ("frase copulare", "copular"),
]


def detect_style(prompt):
    for marker, slug in STYLE_MARKERS:
        if marker in prompt:
            return slug
    return "unrestricted"


class Handler(BaseHTTPRequestHandler):
    def _send(self, status, payload):
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        url = urllib.parse.urlsplit(self.path)
        query = urllib.parse.parse_qs(url.query)
        if url.path == "/w/api.php" and query.get("action") == ["parse"]:
            title = query["page"][0]
            page = WIKI / f"{title}.html"
            if not page.exists():
                return self._send(200, {"error": {"code": "missingtitle", "info": "The page you specified doesn't exist."}})
            return self._send(200, {"parse": {"title": title, "pageid": 1, "text": page.read_text(encoding="utf-8")}})
        if url.path == "/w/api.php" and query.get("action") == ["query"]:
            title = query["titles"][0]
            meta_file = WIKI / f"{title}.meta.json"
            if not meta_file.exists():
                return self._send(200, {"batchcomplete": True, "query": {"pages": [{"title": title, "missing": True}]}})
            meta = json.loads(meta_file.read_text(encoding="utf-8"))
            page = {
                "pageid": 1,
                "ns": 0,
                "title": title,
                "categories": [{"ns": 14, "title": c} for c in meta["categories"]],
                "description": meta["description"],
                "descriptionsource": "local",
                "contentmodel": "wikitext",
                "pagelanguage": "it",
                "fullurl": meta["fullurl"],
            }
            return self._send(200, {"batchcomplete": True, "query": {"pages": [page]}})
        m = re.match(r"^/api/rest_v1/metrics/pageviews/per-article/([^/]+)/all-access/user/([^/]+)/monthly/(\d{8})/(\d{8})$", url.path)
        if m:
            title = urllib.parse.unquote(m.group(2)).replace("_", " ")
            meta_file = WIKI / f"{title}.meta.json"
            if not meta_file.exists():
                return self._send(404, {"type": "https://mediawiki.org/wiki/HyperSwitch/errors/not_found", "title": "Not found."})
            views = json.loads(meta_file.read_text(encoding="utf-8"))["monthly_views"]
            items = [
                {
                    "project": m.group(1).replace(".org", ""),
                    "article": m.group(2),
                    "granularity": "monthly",
                    "timestamp": f"2024{month:02d}0100",
                    "access": "all-access",
                    "agent": "user",
                    "views": v,
                }
                for month, v in enumerate(views, start=1)
            ]
            return self._send(200, {"items": items})
        self._send(404, {"error": "unknown path"})

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        request = json.loads(self.rfile.read(length).decode("utf-8"))
        if self.path != "/v1/chat/completions":
            return self._send(404, {"error": "unknown path"})
        prompt = request["messages"][-1]["content"]
        keyword = re.search(r"è: (.+)\n", prompt).group(1).strip()
        source = "text" if "L'Uzbekistan è una repubblica" in prompt else "Uzbekistan"
        key = f"{keyword}|{detect_style(prompt)}|{source}"
        content = RESPONSES[key]
        self._send(200, {
            "id": "chatcmpl-stub",
            "object": "chat.completion",
            "created": 1736931600,
            "model": request["model"],
            "choices": [{"index": 0, "message": {"role": "assistant", "content": content}, "finish_reason": "stop"}],
            "usage": {"prompt_tokens": 0, "completion_tokens": 0, "total_tokens": 0},
        })

    def log_message(self, fmt, *args):
        sys.stderr.write("stub: " + fmt % args + "\n")


if __name__ == "__main__":
    HTTPServer(("127.0.0.1", int(sys.argv[1]) if len(sys.argv) > 1 else 8765), Handler).serve_forever()
