#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gridplan/scene_graph.hpp"

namespace gridplan {

// One chat turn per stage: the pipeline builds an OpenAI-style request body,
// the transport returns the assistant's JSON text. Implementations: HTTP
// (chat-completions endpoint, bearer auth) and fixture playback, which reads
// committed response files and never opens a socket.
class LlmTransport {
 public:
  virtual ~LlmTransport() = default;
  // attempt starts at 1 and counts retries of the same stage.
  virtual std::string complete(const std::string& stage, int attempt,
                               const json& request) = 0;
};

struct LlmClientConfig {
  std::string endpoint;  // full chat-completions URL, e.g. http://host/v1/chat/completions
  std::string model;
  std::string key_env = "GRIDPLAN_LLM_KEY";  // env var holding the bearer token
  double temperature = 0.0;
  int max_retries = 2;    // extra attempts per stage after the first
  std::string prompt_dir;  // empty -> built-in prompts/ directory
  std::string offline_fixture_dir;  // when set, fixture playback replaces HTTP
};

// endpoint/model from GRIDPLAN_LLM_ENDPOINT / GRIDPLAN_LLM_MODEL.
LlmClientConfig config_from_env();

struct StageRun {
  std::string stage;
  int attempts = 1;
  json output;  // the validated stage result
};

struct AgentReport {
  std::vector<StageRun> stages;        // final run of each stage, in order
  std::vector<Diagnostic> diagnostics; // validation warnings on the result
};

// meters -> whole cells: round half up, never below one cell.
int round_dimensions(double meters, double cell_size_m);

std::unique_ptr<LlmTransport> make_http_transport(const LlmClientConfig& cfg);
std::unique_ptr<LlmTransport> make_fixture_transport(const std::string& dir);

const std::vector<std::string>& agent_stage_names();

// Runs the six analysis stages (basic_info, environment, outdoor_space,
// entrance, room_analysis, furniture_analysis) in order, each seeing the
// brief plus all earlier validated outputs, and assembles the result into a
// SceneGraph. A stage whose reply fails its schema is retried with the
// diagnostics appended to the prompt, up to max_retries; assembly failures
// re-run the stage they implicate. Throws ApiError (transport or auth),
// StageSchemaError (malformed stage output after retries) or ConflictError
// (the assembled scene stays invalid after retries).
SceneGraph run_agents(const std::string& brief, const LlmClientConfig& cfg,
                      AgentReport* report = nullptr);

// Same pipeline with an injected transport; cfg's transport fields ignored.
SceneGraph run_agents_with(LlmTransport& transport, const std::string& brief,
                           const LlmClientConfig& cfg,
                           AgentReport* report = nullptr);

}  // namespace gridplan
