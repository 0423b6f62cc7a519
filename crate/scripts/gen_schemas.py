"""Writes docs/schemas/*.schema.json from shared definitions."""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "docs" / "schemas"
DRAFT = "https://json-schema.org/draft/2020-12/schema"
INDICATORS = ["SMA20", "EMA20", "EMA50", "RSI14", "MACD", "STO"]
LABELS = ["strongBuy", "buy", "weakBuy", "hold", "weakSell", "sell", "strongSell"]


def obj(props, required=None, extra=False):
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": extra,
    }


STR = {"type": "string"}
NONEMPTY = {"type": "string", "minLength": 1}
NUM = {"type": "number"}
INSTANT = {"type": "string", "format": "date-time"}
COUNT = {"type": "integer", "minimum": 0}

DEFS = {
    "instant": INSTANT,
    "indicatorId": {"enum": INDICATORS},
    "candle": obj({"timestamp": INSTANT, "open": NUM, "high": NUM, "low": NUM, "close": NUM, "volume": COUNT}),
    "indicatorValue": {
        "oneOf": [
            NUM,
            obj({"percentK": NUM, "percentD": NUM}),
            obj({"macdLine": NUM, "signalLine": NUM, "histogram": NUM}),
        ]
    },
    "indicatorPoint": obj({"timestamp": INSTANT, "value": {"$ref": "#/$defs/indicatorValue"}}),
    "newsItem": obj({"ticker": NONEMPTY, "headline": NONEMPTY, "source": STR, "url": STR,
                     "publishedAt": INSTANT, "summary": STR}),
    "profile": obj({"ticker": NONEMPTY, "name": NONEMPTY, "ceo": STR, "headquarters": STR, "sector": STR,
                    "description": STR, "annualDividend": {"type": "number", "minimum": 0},
                    "dividendReported": {"type": "boolean"}, "marketCap": NUM}),
    "recommendation": obj({
        "ticker": NONEMPTY,
        "asOf": INSTANT,
        "signals": {"type": "array", "minItems": 6, "maxItems": 6, "items": obj({
            "id": {"$ref": "#/$defs/indicatorId"},
            "signal": {"enum": ["buy", "sell", "neutral"]},
            "evidence": STR,
        })},
        "score": {"type": "integer", "minimum": -6, "maximum": 6},
        "label": {"enum": LABELS},
    }),
    "positionValue": obj({"ticker": NONEMPTY, "shares": {"type": "integer", "minimum": 1}, "costBasis": NUM,
                          "marketValue": NUM, "pnlAbs": NUM, "pnlPct": NUM}),
    "valuation": obj({
        "asOf": INSTANT,
        "perPosition": {"type": "array", "items": {"$ref": "#/$defs/positionValue"}},
        "totalCost": NUM,
        "totalValue": NUM,
        "totalPnlAbs": NUM,
        "totalPnlPct": NUM,
    }),
    "termEntry": obj({"key": NONEMPTY, "title": NONEMPTY, "aliases": {"type": "array", "items": STR},
                      "definition": NONEMPTY, "related": {"type": "array", "items": STR},
                      "tags": {"type": "array", "items": STR}}),
}


def component(kind, props):
    return obj({"componentId": NONEMPTY, "kind": {"const": kind}, **props})


COMPONENTS = [
    component("chart", {
        "ticker": NONEMPTY,
        "name": NONEMPTY,
        "candles": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/candle"}},
        "overlays": {"type": "array", "items": obj({
            "id": {"$ref": "#/$defs/indicatorId"},
            "points": {"type": "array", "items": {"$ref": "#/$defs/indicatorPoint"}},
        })},
        "availableOverlays": {"type": "array", "items": {"$ref": "#/$defs/indicatorId"}, "uniqueItems": True},
        "defaultVisibleOverlays": {"type": "array", "items": {"$ref": "#/$defs/indicatorId"}, "maxItems": 2,
                                   "uniqueItems": True},
    }),
    component("newsTimeline", {"ticker": NONEMPTY, "items": {"type": "array", "items": {"$ref": "#/$defs/newsItem"}}}),
    component("profileCard", {"profile": {"$ref": "#/$defs/profile"}}),
    component("recommendationGauge", {
        "recommendation": {"$ref": "#/$defs/recommendation"},
        "explanationLines": {"type": "array", "minItems": 7, "maxItems": 7, "items": STR},
    }),
    component("portfolioTable", {"valuation": {"$ref": "#/$defs/valuation"}}),
    component("termCard", {
        "entry": {"$ref": "#/$defs/termEntry"},
        "related": {"type": "array", "items": obj({"key": NONEMPTY, "title": NONEMPTY})},
    }),
    component("text", {"title": STR, "lines": {"type": "array", "items": STR}}),
]


def schema(name, title, body, defs=None):
    doc = {"$schema": DRAFT, "$id": f"https://stockbabble.example/schemas/{name}.schema.json", "title": title, **body}
    if defs:
        doc["$defs"] = defs
    (OUT / f"{name}.schema.json").write_text(json.dumps(doc, indent=2) + "\n")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    schema("error", "Error response", obj({"error": obj({"code": {"enum": [
        "malformedJson", "invalidRequest", "emptyUtterance", "invalidUsername", "weakPassword", "usernameTaken",
        "badCredentials", "unauthorized", "tokenExpired", "notFound", "providerUnavailable", "internal"]},
        "message": STR})}))
    schema("register-response", "POST /api/register (201)", obj({"userId": NONEMPTY}))
    schema("login-response", "POST /api/login (200)", obj({
        "token": {"type": "string", "pattern": "^[0-9a-f]{32}$"}, "userId": NONEMPTY, "expiresAt": INSTANT}))
    schema("health-response", "GET /api/health (200)", obj({"status": {"const": "ok"}, "provider": STR}))
    schema("chat-response", "POST /api/message (200)", obj({
        "messages": {"type": "array", "minItems": 1, "items": NONEMPTY},
        "components": {"type": "array", "items": {"oneOf": COMPONENTS}},
        "suggestions": {"type": "array", "items": NONEMPTY},
        "minimizePrevious": {"type": "boolean"},
    }), DEFS)
    schema("valuation", "GET /api/portfolio (200)", {"$ref": "#/$defs/valuation"}, DEFS)


if __name__ == "__main__":
    main()
