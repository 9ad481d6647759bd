// Scriptable stand-in for an OpenAI-compatible chat-completions endpoint.
// The scenario file lists responses in order:
//   {"responses":[{"status":200,"text":"Au beik.","delay_ms":0}, ...],
//    "repeat_last":true}
// "text" is wrapped into a chat-completion body; "body" is served verbatim.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Step {
  int status = 200;
  std::string body;
  int delay_ms = 0;
};

std::vector<Step> load_scenario(const std::string& path, bool* repeat_last) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json j = json::parse(buf.str());
  *repeat_last = j.value("repeat_last", true);
  std::vector<Step> steps;
  for (const auto& r : j.at("responses")) {
    Step step;
    step.status = r.value("status", 200);
    step.delay_ms = r.value("delay_ms", 0);
    if (r.contains("body")) {
      step.body = r["body"].get<std::string>();
    } else {
      json completion = {
          {"choices", json::array({{{"message", {{"role", "assistant"},
                                                 {"content", r.value("text", std::string{})}}}}})}};
      step.body = completion.dump();
    }
    steps.push_back(std::move(step));
  }
  if (steps.empty()) throw std::runtime_error("scenario has no responses");
  return steps;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: mock_llm_server <scenario.json> [port]\n");
    return 2;
  }
  bool repeat_last = true;
  std::vector<Step> steps;
  try {
    steps = load_scenario(argv[1], &repeat_last);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  const int port = argc > 2 ? std::atoi(argv[2]) : 8089;

  std::mutex mutex;
  std::size_t next = 0;
  int hits = 0;

  httplib::Server server;
  server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    Step step;
    {
      std::lock_guard<std::mutex> lock(mutex);
      ++hits;
      if (next < steps.size())
        step = steps[next++];
      else if (repeat_last)
        step = steps.back();
      else
        step = Step{500, R"({"error":"scenario exhausted"})", 0};
    }
    if (step.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(step.delay_ms));
    res.status = step.status;
    res.set_content(step.body, "application/json");
  });
  server.Get("/stats", [&](const httplib::Request&, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(mutex);
    res.set_content(json{{"requests", hits}}.dump(), "application/json");
  });

  std::printf("mock LLM server on port %d, %zu scripted responses\n", port, steps.size());
  if (!server.listen("0.0.0.0", port)) {
    std::fprintf(stderr, "error: cannot bind port %d\n", port);
    return 1;
  }
  return 0;
}
