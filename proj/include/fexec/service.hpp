#pragma once

// HTTP front end for battleship::Game. Page routes follow the shape of the
// original demo (/player1/<id>, /player1strike/<x,y>); /api/* speaks JSON.

#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fexec/battleship.hpp"

namespace fexec::service {

using battleship::Coord;
using battleship::Game;

inline std::string html_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string board_page(int player, const std::vector<Coord>& tiles) {
  std::string html = "<html><body><h1>Player " + std::to_string(player) + "'s Game Board</h1>\n<table>\n";
  for (int y = 0; y < battleship::kBoardSize; ++y) {
    html += "<tr>";
    for (int x = 0; x < battleship::kBoardSize; ++x) {
      bool ship = std::find(tiles.begin(), tiles.end(), Coord{x, y}) != tiles.end();
      html += ship ? "<td>#</td>" : "<td>.</td>";
    }
    html += "</tr>\n";
  }
  return html + "</table>\n</body></html>\n";
}

/// Parses the demo's `x,y` position with single-digit coordinates.
inline std::optional<Coord> parse_position(const std::string& pos) {
  if (pos.size() != 3 || pos[1] != ',' || !std::isdigit(static_cast<unsigned char>(pos[0])) ||
      !std::isdigit(static_cast<unsigned char>(pos[2])))
    return std::nullopt;
  return Coord{pos[0] - '0', pos[2] - '0'};
}

inline std::optional<int> parse_player(const std::string& s) {
  if (s == "1" || s == "player1") return 1;
  if (s == "2" || s == "player2") return 2;
  return std::nullopt;
}

inline void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline int status_for(const battleship::GameError& e) {
  if (e.kind() == "OutOfTurn" || e.kind() == "GameOver") return 409;
  return 400;
}

/// Installs every route on `server`. The game must outlive the server.
inline void install_routes(httplib::Server& server, Game& game) {
  for (int player : {1, 2}) {
    const std::string p = std::to_string(player);
    server.Get("/player" + p + "/:id", [&game, player](const httplib::Request& req, httplib::Response& res) {
      res.set_content(board_page(player, game.view(player, req.path_params.at("id"))), "text/html");
    });
    server.Get("/player" + p + "strike/:pos", [&game, player](const httplib::Request& req, httplib::Response& res) {
      auto pos = parse_position(req.path_params.at("pos"));
      if (!pos) {
        res.status = 400;
        res.set_content("<p>Bad position; use x,y</p>", "text/html");
        return;
      }
      try {
        auto outcome = game.strike(player, pos->x, pos->y);
        const std::string other = std::to_string(3 - player);
        res.set_content(outcome.hit ? "<h1>Congratulations!</h1> <h4>You hit player " + other + "!</h4>"
                                    : std::string("<p>No hit :(</p>"),
                        "text/html");
      } catch (const battleship::GameError& e) {
        res.status = status_for(e);
        res.set_content("<p>" + html_escape(e.what()) + "</p>", "text/html");
      }
    });
  }

  server.Get("/api/board/:player", [&game](const httplib::Request& req, httplib::Response& res) {
    auto player = parse_player(req.path_params.at("player"));
    if (!player) return send_json(res, 404, {{"error", "no such player"}});
    nlohmann::json tiles = nlohmann::json::array();
    for (const auto& c : game.view(*player, req.get_param_value("viewer"))) tiles.push_back({c.x, c.y});
    send_json(res, 200, {{"tiles", tiles}});
  });

  // The path names the board being struck; `by` names the striker.
  server.Post("/api/strike/:player", [&game](const httplib::Request& req, httplib::Response& res) {
    auto target = parse_player(req.path_params.at("player"));
    if (!target) return send_json(res, 404, {{"error", "no such player"}});
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("x") || !body.contains("y") ||
        !body["x"].is_number_integer() || !body["y"].is_number_integer())
      return send_json(res, 400, {{"error", "expected {\"x\": int, \"y\": int, \"by\": player}"}});
    int striker = 3 - *target;
    if (body.contains("by")) {
      auto by = body["by"].is_string() ? parse_player(body["by"].get<std::string>())
                : body["by"].is_number_integer() ? parse_player(std::to_string(body["by"].get<int>()))
                                                 : std::nullopt;
      if (!by || *by == *target) return send_json(res, 400, {{"error", "'by' must be the opposing player"}});
      striker = *by;
    }
    try {
      auto outcome = game.strike(striker, body["x"].get<int>(), body["y"].get<int>());
      send_json(res, 200, {{"hit", outcome.hit}, {"remaining", outcome.remaining}, {"game_over", outcome.game_over}});
    } catch (const battleship::GameError& e) {
      send_json(res, status_for(e), {{"error", e.what()}, {"kind", e.kind()}});
    }
  });

  server.Get("/api/state", [&game](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, game.state());
  });

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) res.set_content("not found", "text/plain");
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send_json(res, 500, {{"error", what}});
  });
}

}  // namespace fexec::service
