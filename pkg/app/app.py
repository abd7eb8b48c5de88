import logging

from flask import Flask, jsonify, request

from app.config import ExperimentConfig, expand_sweep, list_recipes, load_raw
from app.experiment_manager import ExperimentManager, analyze_report, rows_frame, summarize
from core.errors import ConfigError, ParArmError

logger = logging.getLogger(__name__)

app = Flask(__name__)
app.config['MAX_CONTENT_LENGTH'] = 1 * 1024 * 1024  # configs are small JSON documents
app.config['MAX_API_REPLICATIONS'] = 200


def _config_from_request():
    raw = request.get_json(silent=True)
    if not isinstance(raw, dict):
        raise ConfigError("request body must be a JSON experiment config")
    if "sweep" in raw:
        raise ConfigError("sweeps are not accepted over the API; post one grid point at a time")
    return ExperimentConfig.from_dict(raw)


@app.route('/api/recipes', methods=['GET'])
def get_recipes():
    return jsonify({"status": "success", "recipes": list_recipes()})


@app.route('/api/recipes/<name>', methods=['GET'])
def get_recipe(name):
    if name not in list_recipes():
        return jsonify({"status": "error", "message": f"Unknown recipe: {name}"}), 404
    raw = load_raw(name)
    return jsonify({"status": "success", "recipe": raw, "points": len(expand_sweep(raw))})


@app.route('/api/analyze', methods=['POST'])
def analyze():
    try:
        config = _config_from_request()
        return jsonify({"status": "success", "report": analyze_report(config)})
    except ParArmError as e:
        return jsonify({"status": "error", "message": str(e)}), 400
    except Exception as e:
        logger.exception("Analysis failed")
        return jsonify({"status": "error", "message": f"An unexpected error occurred: {e}"}), 500


@app.route('/api/run', methods=['POST'])
def run():
    try:
        config = _config_from_request()
        if config.replications > app.config['MAX_API_REPLICATIONS']:
            raise ConfigError(f"at most {app.config['MAX_API_REPLICATIONS']} replications per request")
        manager = ExperimentManager(config)
        rows = manager.run_experiment()
        frame = rows_frame(rows, include_timing=True)
        summary = summarize(rows)
        return jsonify({
            "status": "success",
            "rows": frame.astype(object).where(frame.notna(), None).to_dict(orient="records"),
            "summary": summary.astype(object).where(summary.notna(), None).to_dict(orient="records"),
        })
    except ParArmError as e:
        return jsonify({"status": "error", "message": str(e)}), 400
    except Exception as e:
        logger.exception("Run failed")
        return jsonify({"status": "error", "message": f"An unexpected error occurred: {e}"}), 500
