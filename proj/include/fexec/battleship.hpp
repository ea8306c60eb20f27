#pragma once

// Two-player Battleship whose game logic is a faceted program. Boards live
// in boxes, each faceted by its owner's label; the host only ever sees
// values that went through an obs and then through export_plain().

#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fexec/evaluator.hpp"
#include "fexec/reader.hpp"

namespace fexec::battleship {

struct Coord {
  int x = 0;
  int y = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

class GameError : public std::runtime_error {
 public:
  GameError(std::string kind, const std::string& msg) : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

struct InvalidBoard : GameError {
  explicit InvalidBoard(const std::string& m) : GameError("InvalidBoard", m) {}
};
struct InvalidCoordinate : GameError {
  explicit InvalidCoordinate(const std::string& m) : GameError("InvalidCoordinate", m) {}
};
struct OutOfTurn : GameError {
  explicit OutOfTurn(const std::string& m) : GameError("OutOfTurn", m) {}
};
struct GameOver : GameError {
  explicit GameOver(const std::string& m) : GameError("GameOver", m) {}
};

struct StrikeOutcome {
  bool hit = false;
  std::int64_t remaining = 0;
  bool game_over = false;
};

constexpr int kBoardSize = 10;

inline std::string player_id(int player) { return "player" + std::to_string(player); }

/// The game program. Host values (initial boards, coordinates, viewer ids)
/// are passed as arguments, never spliced into source text.
inline constexpr const char* kGameProgram = R"(
(define (makeboard) '())
(define (add-piece board x y) (cons (cons x y) board))
(define (mark-hit board x y)
  (if (null? board)
      (cons board false)
      (let* ([fst (car board)]
             [rst (cdr board)])
        (if (and (= (car fst) x)
                 (= (cdr fst) y))
            (cons rst true)
            (let ([rst+b (mark-hit rst x y)])
              (cons (cons fst
                          (car rst+b))
                    (cdr rst+b)))))))
(define (count-tiles board)
  (if (null? board) 0 (+ 1 (count-tiles (cdr board)))))

(define p1l (let-label p1 (lambda (x) (= x "player1")) p1))
(define p2l (let-label p2 (lambda (x) (= x "player2")) p2))
(define p1board (box (facet p1l (makeboard) (makeboard))))
(define p2board (box (facet p2l (makeboard) (makeboard))))

(define (install1! board) (set! p1board (facet p1l board (makeboard))))
(define (install2! board) (set! p2board (facet p2l board (makeboard))))

(define (player1board viewer) (obs p1l viewer (unbox p1board)))
(define (player2board viewer) (obs p2l viewer (unbox p2board)))

(define (p1strike x y)
  (let ([ans (mark-hit (unbox p2board) x y)])
    (begin
      (set! p2board (car ans))
      (cdr (obs p2l "player2" ans)))))
(define (p2strike x y)
  (let ([ans (mark-hit (unbox p1board) x y)])
    (begin
      (set! p1board (car ans))
      (cdr (obs p1l "player1" ans)))))

(define (remaining1) (count-tiles (obs p1l "player1" (unbox p1board))))
(define (remaining2) (count-tiles (obs p2l "player2" (unbox p2board))))
)";

/// The lifting point between faceted code and the host: anything leaving
/// the interpreter must be plain data, with no facet or star inside.
inline Value export_plain(const Value& v) {
  switch (v.kind()) {
    case Kind::Facet:
      throw FacetEscape("faceted value reached the host boundary: " + print(v));
    case Kind::Star:
      throw StarObserved("#star reached the host boundary");
    case Kind::Pair:
      export_plain(v.car());
      export_plain(v.cdr());
      return v;
    case Kind::Closure:
    case Kind::Primitive:
    case Kind::Address:
    case Kind::Label:
      throw TypeError("only plain data may cross the host boundary, got " + print(v));
    default:
      return v;
  }
}

inline std::vector<Coord> board_from_value(const Value& board) {
  std::vector<Coord> out;
  for (Value cur = export_plain(board); cur.is(Kind::Pair); cur = cur.cdr()) {
    Value c = cur.car();
    out.push_back({static_cast<int>(c.car().as_int()), static_cast<int>(c.cdr().as_int())});
  }
  return out;
}

inline void check_coord(int x, int y) {
  if (x < 0 || y < 0 || x >= kBoardSize || y >= kBoardSize)
    throw InvalidCoordinate("coordinate (" + std::to_string(x) + "," + std::to_string(y) + ") is off the board");
}

/// Parses whitespace-separated `x y` pairs.
inline std::vector<Coord> parse_board(const std::string& text) {
  std::istringstream in(text);
  std::vector<Coord> out;
  long long x, y;
  while (in >> x) {
    if (!(in >> y)) throw InvalidBoard("odd number of coordinates");
    if (x < 0 || y < 0 || x >= kBoardSize || y >= kBoardSize)
      throw InvalidBoard("coordinate (" + std::to_string(x) + "," + std::to_string(y) + ") is off the board");
    out.push_back({static_cast<int>(x), static_cast<int>(y)});
  }
  if (!in.eof()) throw InvalidBoard("board file must contain only integers");
  return out;
}

class Game {
 public:
  Game(const std::vector<Coord>& board1, const std::vector<Coord>& board2) {
    validate(board1);
    validate(board2);
    interp_.set_output(nullptr);
    interp_.run(Reader{}.parse(kGameProgram));
    install(1, board1);
    install(2, board2);
    refresh_over();
  }

  /// Board `player` as seen by `viewer`: the obs runs the owner's policy.
  std::vector<Coord> view(int player, const std::string& viewer) {
    std::lock_guard lock(mu_);
    check_player(player);
    return board_from_value(call("player" + std::to_string(player) + "board", {Value::string(viewer)}));
  }

  /// `striker` fires at the other player's board.
  StrikeOutcome strike(int striker, int x, int y) {
    std::lock_guard lock(mu_);
    check_player(striker);
    if (over_) throw GameOver("the game is over");
    if (turn_ && *turn_ != striker) throw OutOfTurn("it is " + player_id(*turn_) + "'s turn");
    check_coord(x, y);
    Value hit = export_plain(call("p" + std::to_string(striker) + "strike", {Value::integer(x), Value::integer(y)}));
    StrikeOutcome out;
    out.hit = hit.truthy();
    out.remaining = remaining_locked(3 - striker);
    turn_ = 3 - striker;
    ++strikes_;
    refresh_over();
    out.game_over = over_;
    return out;
  }

  /// Tiles left on `player`'s board, declassified under the owner's key as
  /// the hit flag is.
  std::int64_t remaining(int player) {
    std::lock_guard lock(mu_);
    check_player(player);
    return remaining_locked(player);
  }

  nlohmann::json state() {
    std::lock_guard lock(mu_);
    nlohmann::json j;
    j["turn"] = turn_ ? nlohmann::json(player_id(*turn_)) : nlohmann::json(nullptr);
    j["game_over"] = over_;
    j["winner"] = winner_ ? nlohmann::json(player_id(*winner_)) : nlohmann::json(nullptr);
    j["remaining"] = {{"player1", remaining_locked(1)}, {"player2", remaining_locked(2)}};
    j["strikes"] = strikes_;
    return j;
  }

  bool over() {
    std::lock_guard lock(mu_);
    return over_;
  }

  /// Whose move it is; empty before the first strike, when either may start.
  std::optional<int> turn() {
    std::lock_guard lock(mu_);
    return turn_;
  }

 private:
  static void validate(const std::vector<Coord>& board) {
    std::set<Coord> seen;
    for (const auto& c : board) {
      if (c.x < 0 || c.y < 0 || c.x >= kBoardSize || c.y >= kBoardSize)
        throw InvalidBoard("coordinate (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") is off the board");
      if (!seen.insert(c).second)
        throw InvalidBoard("duplicate coordinate (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")");
    }
  }

  static void check_player(int player) {
    if (player != 1 && player != 2) throw InvalidCoordinate("no such player " + std::to_string(player));
  }

  Value call(const std::string& fn, const std::vector<Value>& args) {
    return interp_.apply(lookup(interp_.globals(), fn, {}), args, PC{});
  }

  void install(int player, const std::vector<Coord>& tiles) {
    // Fold add-piece in reverse so the list reads in file order.
    Value board = call("makeboard", {});
    Value add = lookup(interp_.globals(), "add-piece", {});
    for (auto it = tiles.rbegin(); it != tiles.rend(); ++it)
      board = interp_.apply(add, {board, Value::integer(it->x), Value::integer(it->y)}, PC{});
    call("install" + std::to_string(player) + "!", {board});
  }

  std::int64_t remaining_locked(int player) {
    return export_plain(call("remaining" + std::to_string(player), {})).as_int();
  }

  void refresh_over() {
    for (int p : {1, 2}) {
      if (remaining_locked(p) == 0) {
        over_ = true;
        winner_ = 3 - p;
        return;
      }
    }
  }

  std::mutex mu_;
  Interpreter interp_;
  std::optional<int> turn_;
  bool over_ = false;
  std::optional<int> winner_;
  std::int64_t strikes_ = 0;
};

}  // namespace fexec::battleship
