#include "hlwc/config.hpp"

#include "hlwc/errors.hpp"

namespace hlwc {

SnapshotRule parse_snapshot_rule(const std::string& s) {
  if (s == "final") return SnapshotRule::Final;
  if (s == "maxll") return SnapshotRule::MaxLL;
  throw ValueError("snapshot must be 'final' or 'maxll', got '" + s + "'");
}

std::string to_string(SnapshotRule rule) { return rule == SnapshotRule::Final ? "final" : "maxll"; }

void RunConfig::validate() const {
  if (iterations < 1) throw ValueError("iterations must be at least 1");
  if (chains < 1) throw ValueError("chains must be at least 1");
  if (hyper.depth < 2) throw ValueError("levels must be at least 2");
  if (export_options.min_share < 0.0 || export_options.min_share > 1.0)
    throw ValueError("display share threshold must lie in [0, 1]");
  Hyperparams h = hyper;
  if (h.n_docs == 0) h.n_docs = 1;  // corpus not loaded yet
  h.validate();
}

nlohmann::json RunConfig::to_json() const {
  return {
      {"gamma", hyper.gamma},
      {"eta", hyper.eta},
      {"alpha", hyper.alpha},
      {"levels", hyper.depth},
      {"iters", iterations},
      {"seed", seed},
      {"skip_top", skip_top},
      {"keep_next", keep_next},
      {"checkpoint_every", checkpoint_every},
      {"snapshot", to_string(snapshot)},
      {"chains", chains},
      {"min_share", export_options.min_share},
      {"min_tokens", export_options.min_tokens},
  };
}

}  // namespace hlwc
