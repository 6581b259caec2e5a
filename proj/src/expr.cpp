// Copyright (c) opaque-reach contributors.
// SPDX-License-Identifier: Apache-2.0
#include "opaque/expr.hpp"

#include "opaque/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace opaque {

struct Expr::Node {
    enum class Op { constant, state, control, add, sub, mul, div, pow, neg };
    Op op = Op::constant;
    double value = 0.0;
    int index = 0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
  public:
    Parser(const std::string& s, int n, int m) : s_(s), n_(n), m_(m) {}

    NodePtr parse() {
        NodePtr e = expr();
        skip();
        if (pos_ != s_.size()) {
            throw ParseError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
        }
        return e;
    }

  private:
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr expr() {
        NodePtr left = term();
        for (;;) {
            if (eat('+')) {
                left = make(Node::Op::add, left, term());
            } else if (eat('-')) {
                left = make(Node::Op::sub, left, term());
            } else {
                return left;
            }
        }
    }

    NodePtr term() {
        NodePtr left = unary();
        for (;;) {
            if (eat('*')) {
                left = make(Node::Op::mul, left, unary());
            } else if (eat('/')) {
                left = make(Node::Op::div, left, unary());
            } else {
                return left;
            }
        }
    }

    NodePtr unary() {
        if (eat('-')) {
            return make(Node::Op::neg, unary());
        }
        if (eat('+')) {
            return unary();
        }
        NodePtr base = primary();
        if (eat('^')) {
            return make(Node::Op::pow, base, unary());
        }
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos_ >= s_.size()) {
            throw ParseError("unexpected end of expression", pos_);
        }
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) {
                throw ParseError("bad number", pos_);
            }
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Node>();
            n->value = v;
            return n;
        }
        if (s_.compare(pos_, 3, "pow") == 0) {
            pos_ += 3;
            expect('(');
            NodePtr a = expr();
            expect(',');
            NodePtr b = expr();
            expect(')');
            return make(Node::Op::pow, a, b);
        }
        if (c == 'x' || c == 'u') {
            const std::size_t at = pos_++;
            const bool bracket = pos_ < s_.size() && s_[pos_] == '[';
            if (bracket || (pos_ < s_.size() && s_[pos_] == '_')) {
                ++pos_;
            }
            const std::size_t digits = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            }
            if (pos_ == digits) {
                throw ParseError(std::string("expected an index after '") + c + "'", pos_);
            }
            const int index = std::stoi(s_.substr(digits, pos_ - digits));
            if (bracket) {
                expect(']');
            }
            const int limit = c == 'x' ? n_ : m_;
            if (index >= limit) {
                throw ParseError(std::string(1, c) + std::to_string(index) + " out of range (dimension " +
                                     std::to_string(limit) + ")",
                                 at);
            }
            auto n = std::make_shared<Node>();
            n->op = c == 'x' ? Node::Op::state : Node::Op::control;
            n->index = index;
            return n;
        }
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
    }

    const std::string& s_;
    int n_;
    int m_;
    std::size_t pos_ = 0;
};

double eval_node(const Node& n, const Vec& x, const Vec& u) {
    switch (n.op) {
    case Node::Op::constant:
        return n.value;
    case Node::Op::state:
        return x(n.index);
    case Node::Op::control:
        return u(n.index);
    case Node::Op::add:
        return eval_node(*n.a, x, u) + eval_node(*n.b, x, u);
    case Node::Op::sub:
        return eval_node(*n.a, x, u) - eval_node(*n.b, x, u);
    case Node::Op::mul:
        return eval_node(*n.a, x, u) * eval_node(*n.b, x, u);
    case Node::Op::div:
        return eval_node(*n.a, x, u) / eval_node(*n.b, x, u);
    case Node::Op::pow:
        return std::pow(eval_node(*n.a, x, u), eval_node(*n.b, x, u));
    case Node::Op::neg:
        return -eval_node(*n.a, x, u);
    }
    return 0.0;
}

} // namespace

Expr Expr::parse(const std::string& text, int n, int m) {
    Expr e;
    e.root_ = Parser(text, n, m).parse();
    e.text_ = text;
    return e;
}

double Expr::eval(const Vec& x, const Vec& u) const { return eval_node(*root_, x, u); }

} // namespace opaque
