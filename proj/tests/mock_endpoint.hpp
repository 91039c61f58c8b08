#pragma once

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

namespace testing {

// Local embeddings endpoint. Text "t<i>" maps to the basis vector e_i in
// `dim` dimensions; any text containing "poison" gets a 500.
class MockEndpoint {
 public:
  explicit MockEndpoint(std::size_t dim = 8) : dim_(dim) {
    server_.Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
      requests++;
      {
        std::lock_guard lock(mu_);
        last_auth = req.get_header_value("Authorization");
      }
      if (fail_next > 0) {
        fail_next--;
        res.status = 503;
        return;
      }
      auto body = nlohmann::json::parse(req.body);
      nlohmann::json data = nlohmann::json::array();
      std::size_t index = 0;
      for (const auto& input : body.at("input")) {
        const auto text = input.get<std::string>();
        if (text.find("poison") != std::string::npos) {
          res.status = 500;
          return;
        }
        data.push_back({{"index", index++}, {"embedding", vector_for(text)}});
      }
      if (wrong_dim_for_odd && body.at("input").size() % 2 == 1) data[0]["embedding"].push_back(1.0);
      res.set_content(nlohmann::json{{"object", "list"}, {"data", data}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~MockEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::vector<double> vector_for(const std::string& text) const {
    std::vector<double> v(dim_, 0.0);
    v[std::stoul(text.substr(1)) % dim_] = 1.0;
    return v;
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  std::string auth() {
    std::lock_guard lock(mu_);
    return last_auth;
  }

  std::atomic<int> requests{0};
  std::atomic<int> fail_next{0};
  std::atomic<bool> wrong_dim_for_odd{false};

 private:
  std::size_t dim_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mu_;
  std::string last_auth;
};

}  // namespace testing
