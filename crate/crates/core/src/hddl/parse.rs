//! Domain and problem readers with declaration, arity and type checks.

use std::collections::HashSet;

use super::ast::*;
use super::sexpr::{read, Pos, SExpr};
use super::HddlError;
use crate::model::{Endpoint, Relation};
use crate::Rational;
use crate::Scalar;

type Result<T> = std::result::Result<T, HddlError>;

fn list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr]> {
    e.as_list().ok_or_else(|| HddlError::syntax(e.pos(), format!("expected a list for {what}")))
}

fn atom<'a>(e: &'a SExpr, what: &str) -> Result<&'a str> {
    e.as_atom().ok_or_else(|| HddlError::syntax(e.pos(), format!("expected a name for {what}")))
}

fn name(e: &SExpr, what: &str) -> Result<String> {
    let s = atom(e, what)?;
    if s.starts_with(':') || s.starts_with('?') || s == "-" {
        return Err(HddlError::syntax(e.pos(), format!("`{s}` is not a valid {what}")));
    }
    Ok(s.to_string())
}

/// `a b - t c - u d`; names without a type get `object`.
fn typed_names(items: &[SExpr], variables: bool) -> Result<Vec<TypedName>> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let e = &items[i];
        let s = atom(e, "a typed list")?;
        if s == "-" {
            let ty = items.get(i + 1).ok_or_else(|| HddlError::syntax(e.pos(), "missing type after `-`"))?;
            if ty.head() == Some("either") {
                return Err(HddlError::unsupported(ty.pos(), "`either` types"));
            }
            let ty = name(ty, "type")?;
            if pending.is_empty() {
                return Err(HddlError::syntax(e.pos(), "`-` without preceding names"));
            }
            out.extend(pending.drain(..).map(|n| TypedName { name: n, ty: ty.clone() }));
            i += 2;
            continue;
        }
        if variables != s.starts_with('?') {
            let msg = if variables { "expected a variable" } else { "unexpected variable" };
            return Err(HddlError::syntax(e.pos(), format!("{msg}: `{s}`")));
        }
        pending.push(s.to_string());
        i += 1;
    }
    out.extend(pending.into_iter().map(|n| TypedName { name: n, ty: "object".into() }));
    Ok(out)
}

/// Items of `(and ...)`, of `()`, or the expression itself.
fn conjuncts(e: &SExpr) -> Result<Vec<&SExpr>> {
    let items = list(e, "a condition")?;
    if items.is_empty() {
        return Ok(vec![]);
    }
    if items[0].as_atom() == Some("and") {
        return Ok(items[1..].iter().collect());
    }
    Ok(vec![e])
}

/// `:key value` pairs starting at `items[from]`.
fn keywords(items: &[SExpr], from: usize) -> Result<Vec<(&str, &SExpr)>> {
    let mut out = Vec::new();
    let mut i = from;
    while i < items.len() {
        let key = atom(&items[i], "a keyword")?;
        if !key.starts_with(':') {
            return Err(HddlError::syntax(items[i].pos(), format!("expected a keyword, found `{key}`")));
        }
        let value = items
            .get(i + 1)
            .ok_or_else(|| HddlError::syntax(items[i].pos(), format!("missing value for `{key}`")))?;
        out.push((key, value));
        i += 2;
    }
    Ok(out)
}

/// Names visible inside a schema: its parameters plus constants/objects.
struct Scope<'a> {
    variables: &'a [TypedName],
    objects: &'a HashSet<String>,
}

impl Scope<'_> {
    fn check_arg(&self, e: &SExpr) -> Result<String> {
        let s = atom(e, "an argument")?;
        if s.starts_with('?') {
            if !self.variables.iter().any(|v| v.name == s) {
                return Err(HddlError::invalid(e.pos(), format!("undeclared variable `{s}`")));
            }
        } else if !self.objects.contains(s) {
            return Err(HddlError::invalid(e.pos(), format!("undeclared object `{s}`")));
        }
        Ok(s.to_string())
    }
}

fn arity_error(pos: Pos, what: &str, name: &str, expected: usize, found: usize) -> HddlError {
    HddlError::invalid(pos, format!("{what} `{name}` takes {expected} argument(s), found {found}"))
}

struct Checker<'a> {
    domain: &'a DomainAst,
    objects: HashSet<String>,
}

impl Checker<'_> {
    fn scope<'s>(&'s self, variables: &'s [TypedName]) -> Scope<'s> {
        Scope { variables, objects: &self.objects }
    }

    fn proposition(&self, e: &SExpr, scope: &Scope<'_>) -> Result<AtomAst> {
        let items = list(e, "a proposition")?;
        let head_expr = items.first().ok_or_else(|| HddlError::syntax(e.pos(), "empty proposition"))?;
        let head = atom(head_expr, "a predicate")?;
        if head == "not" {
            return Err(HddlError::unsupported(e.pos(), "negative conditions"));
        }
        if matches!(head, "or" | "imply" | "forall" | "exists" | "when" | "=") {
            return Err(HddlError::unsupported(e.pos(), format!("`{head}` expressions")));
        }
        let sig = self
            .domain
            .predicate(head)
            .ok_or_else(|| HddlError::invalid(head_expr.pos(), format!("undeclared predicate `{head}`")))?;
        if sig.params.len() != items.len() - 1 {
            return Err(arity_error(e.pos(), "predicate", head, sig.params.len(), items.len() - 1));
        }
        let args = items[1..].iter().map(|a| scope.check_arg(a)).collect::<Result<_>>()?;
        Ok(AtomAst { head: head.to_string(), args })
    }

    fn literal(&self, e: &SExpr, scope: &Scope<'_>, effects: &mut EffectsAst) -> Result<()> {
        if e.head() == Some("not") {
            let items = list(e, "a negation")?;
            if items.len() != 2 {
                return Err(HddlError::syntax(e.pos(), "`not` takes one proposition"));
            }
            effects.del.push(self.proposition(&items[1], scope)?);
        } else {
            effects.add.push(self.proposition(e, scope)?);
        }
        Ok(())
    }

    fn task_atom(&self, e: &SExpr, scope: &Scope<'_>) -> Result<AtomAst> {
        let items = list(e, "a task")?;
        let head_expr = items.first().ok_or_else(|| HddlError::syntax(e.pos(), "empty task"))?;
        let head = atom(head_expr, "a task name")?;
        let arity = self
            .domain
            .task_arity(head)
            .ok_or_else(|| HddlError::invalid(head_expr.pos(), format!("undeclared task `{head}`")))?;
        if arity != items.len() - 1 {
            return Err(arity_error(e.pos(), "task", head, arity, items.len() - 1));
        }
        let args = items[1..].iter().map(|a| scope.check_arg(a)).collect::<Result<_>>()?;
        Ok(AtomAst { head: head.to_string(), args })
    }

    fn check_types(&self, names: &[TypedName], pos: Pos) -> Result<()> {
        for n in names {
            if n.ty != "object" && !self.domain.types.iter().any(|t| t.name == n.ty) {
                return Err(HddlError::invalid(pos, format!("undeclared type `{}` of `{}`", n.ty, n.name)));
            }
        }
        Ok(())
    }

    fn parameters(&self, value: Option<&SExpr>, pos: Pos) -> Result<Vec<TypedName>> {
        let Some(value) = value else { return Ok(vec![]) };
        let params = typed_names(list(value, "parameters")?, true)?;
        self.check_types(&params, value.pos())?;
        let mut seen = HashSet::new();
        for p in &params {
            if !seen.insert(&p.name) {
                return Err(HddlError::invalid(pos, format!("parameter `{}` declared twice", p.name)));
            }
        }
        Ok(params)
    }

    fn action(&self, items: &[SExpr], pos: Pos) -> Result<ActionAst> {
        let name = name(items.get(1).ok_or_else(|| HddlError::syntax(pos, "action without a name"))?, "action name")?;
        let kw = keywords(items, 2)?;
        let mut params = vec![];
        let mut pre = vec![];
        let mut effects = EffectsAst::default();
        for &(key, value) in &kw {
            match key {
                ":parameters" => params = self.parameters(Some(value), pos)?,
                ":precondition" => {
                    let scope = self.scope(&params);
                    for c in conjuncts(value)? {
                        pre.push(self.proposition(c, &scope)?);
                    }
                }
                ":effect" => {
                    let scope = self.scope(&params);
                    for c in conjuncts(value)? {
                        self.literal(c, &scope, &mut effects)?;
                    }
                }
                _ => return Err(HddlError::unsupported(value.pos(), format!("`{key}` in an action"))),
            }
        }
        Ok(ActionAst { name, params, pre, effects })
    }

    /// `(at start X)`, `(at end X)` or `(over all X)`.
    fn timed<'e>(&self, e: &'e SExpr) -> Result<(&'static str, &'e SExpr)> {
        let items = list(e, "a timed expression")?;
        let when = match items {
            [a, b, _] => match (a.as_atom(), b.as_atom()) {
                (Some("at"), Some("start")) => Some("start"),
                (Some("at"), Some("end")) => Some("end"),
                (Some("over"), Some("all")) => Some("all"),
                _ => None,
            },
            _ => None,
        };
        match when {
            Some(w) => Ok((w, &items[2])),
            None => Err(HddlError::syntax(e.pos(), "expected `(at start ...)`, `(at end ...)` or `(over all ...)`")),
        }
    }

    fn durative_action(&self, items: &[SExpr], pos: Pos) -> Result<DurativeActionAst> {
        let name = name(items.get(1).ok_or_else(|| HddlError::syntax(pos, "action without a name"))?, "action name")?;
        let kw = keywords(items, 2)?;
        let params = self.parameters(kw.iter().find(|k| k.0 == ":parameters").map(|k| k.1), pos)?;
        let scope = self.scope(&params);
        let mut a = DurativeActionAst {
            name,
            params: params.clone(),
            duration: String::new(),
            at_start: vec![],
            over_all: vec![],
            at_end: vec![],
            start_effects: EffectsAst::default(),
            end_effects: EffectsAst::default(),
        };
        for &(key, value) in &kw {
            match key {
                ":parameters" => {}
                ":duration" => {
                    let d = list(value, "a duration")?;
                    let ok = matches!(d, [eq, var, _] if eq.as_atom() == Some("=") && var.as_atom() == Some("?duration"));
                    if !ok {
                        return Err(HddlError::unsupported(value.pos(), "durations other than `(= ?duration <number>)`"));
                    }
                    let text = atom(&d[2], "a duration")?;
                    match Rational::parse_literal(text) {
                        Some(v) if v > Rational::from_integer(0) => a.duration = text.to_string(),
                        Some(_) => return Err(HddlError::invalid(d[2].pos(), format!("duration `{text}` is not positive"))),
                        None => return Err(HddlError::syntax(d[2].pos(), format!("invalid duration `{text}`"))),
                    }
                }
                ":condition" => {
                    for c in conjuncts(value)? {
                        let (when, inner) = self.timed(c)?;
                        let target = match when {
                            "start" => &mut a.at_start,
                            "end" => &mut a.at_end,
                            _ => &mut a.over_all,
                        };
                        for p in conjuncts(inner)? {
                            target.push(self.proposition(p, &scope)?);
                        }
                    }
                }
                ":effect" => {
                    for c in conjuncts(value)? {
                        let (when, inner) = self.timed(c)?;
                        let target = match when {
                            "start" => &mut a.start_effects,
                            "end" => &mut a.end_effects,
                            _ => return Err(HddlError::unsupported(c.pos(), "`over all` effects")),
                        };
                        for l in conjuncts(inner)? {
                            self.literal(l, &scope, target)?;
                        }
                    }
                }
                _ => return Err(HddlError::unsupported(value.pos(), format!("`{key}` in a durative action"))),
            }
        }
        if a.duration.is_empty() {
            return Err(HddlError::syntax(pos, format!("durative action `{}` has no `:duration`", a.name)));
        }
        Ok(a)
    }

    fn point(&self, e: &SExpr, default: Endpoint, ids: &[String]) -> Result<PointRef> {
        let (id_expr, endpoint) = match e {
            SExpr::Atom(..) => (e, default),
            SExpr::List(items, _) => match items.as_slice() {
                [w, id] if w.as_atom() == Some("start") => (id, Endpoint::Start),
                [w, id] if w.as_atom() == Some("end") => (id, Endpoint::End),
                _ => return Err(HddlError::syntax(e.pos(), "expected a subtask id, `(start id)` or `(end id)`")),
            },
        };
        let id = atom(id_expr, "a subtask id")?;
        if !ids.iter().any(|i| i == id) {
            return Err(HddlError::invalid(id_expr.pos(), format!("unknown subtask id `{id}`")));
        }
        Ok(PointRef { subtask: id.to_string(), endpoint })
    }

    fn network(&self, kw: &[(&str, &SExpr)], scope: &Scope<'_>) -> Result<TaskNetworkAst> {
        let mut net = TaskNetworkAst::default();
        let mut subtasks_seen = false;
        for &(key, value) in kw {
            let ordered = match key {
                ":subtasks" | ":tasks" => false,
                ":ordered-subtasks" | ":ordered-tasks" => true,
                _ => continue,
            };
            if subtasks_seen {
                return Err(HddlError::syntax(value.pos(), "more than one subtask list"));
            }
            subtasks_seen = true;
            net.ordered = ordered;
            for (i, s) in conjuncts(value)?.into_iter().enumerate() {
                let items = list(s, "a subtask")?;
                let sub = match items {
                    [id, task @ SExpr::List(..)] => SubtaskAst { id: name(id, "subtask id")?, task: self.task_atom(task, scope)? },
                    _ => SubtaskAst { id: format!("_s{i}"), task: self.task_atom(s, scope)? },
                };
                if net.subtasks.iter().any(|t| t.id == sub.id) {
                    return Err(HddlError::invalid(s.pos(), format!("subtask id `{}` used twice", sub.id)));
                }
                net.subtasks.push(sub);
            }
        }
        let ids: Vec<String> = net.subtasks.iter().map(|s| s.id.clone()).collect();
        for &(key, value) in kw {
            if key != ":ordering" && key != ":constraints" {
                continue;
            }
            for c in conjuncts(value)? {
                let items = list(c, "an ordering constraint")?;
                let [rel, l, r] = items else {
                    return Err(HddlError::syntax(c.pos(), "expected `(<relation> a b)`"));
                };
                let rel_name = atom(rel, "a relation")?;
                let relation = Relation::from_symbol(rel_name)
                    .ok_or_else(|| HddlError::syntax(rel.pos(), format!("unknown relation `{rel_name}`")))?;
                net.ordering.push(OrderingAst {
                    left: self.point(l, Endpoint::End, &ids)?,
                    relation,
                    right: self.point(r, Endpoint::Start, &ids)?,
                });
            }
        }
        Ok(net)
    }

    fn method(&self, items: &[SExpr], pos: Pos) -> Result<MethodAst> {
        let name = name(items.get(1).ok_or_else(|| HddlError::syntax(pos, "method without a name"))?, "method name")?;
        let kw = keywords(items, 2)?;
        let params = self.parameters(kw.iter().find(|k| k.0 == ":parameters").map(|k| k.1), pos)?;
        let scope = self.scope(&params);
        let mut task = None;
        for &(key, value) in &kw {
            match key {
                ":parameters" | ":subtasks" | ":tasks" | ":ordered-subtasks" | ":ordered-tasks" | ":ordering"
                | ":constraints" => {}
                ":task" => {
                    let t = self.task_atom(value, &scope)?;
                    if self.domain.task(&t.head).is_none() {
                        return Err(HddlError::invalid(value.pos(), format!("`{}` is not an abstract task", t.head)));
                    }
                    task = Some(t);
                }
                ":precondition" => return Err(HddlError::unsupported(value.pos(), "method preconditions")),
                _ => return Err(HddlError::unsupported(value.pos(), format!("`{key}` in a method"))),
            }
        }
        let task = task.ok_or_else(|| HddlError::syntax(pos, format!("method `{name}` has no `:task`")))?;
        let network = self.network(&kw, &scope)?;
        Ok(MethodAst { name, params, task, network })
    }
}

fn define<'a>(kind: &str, exprs: &'a [SExpr]) -> Result<(&'a [SExpr], String)> {
    let [top] = exprs else {
        let pos = exprs.get(1).map(|e| e.pos()).unwrap_or_default();
        return Err(HddlError::syntax(pos, "expected exactly one `(define ...)`"));
    };
    let items = list(top, "define")?;
    if items.first().and_then(|e| e.as_atom()) != Some("define") {
        return Err(HddlError::syntax(top.pos(), "expected `(define ...)`"));
    }
    let header = items.get(1).ok_or_else(|| HddlError::syntax(top.pos(), format!("missing `({kind} <name>)`")))?;
    match list(header, kind)? {
        [k, n] if k.as_atom() == Some(kind) => Ok((&items[2..], name(n, kind)?)),
        _ => Err(HddlError::syntax(header.pos(), format!("expected `({kind} <name>)`"))),
    }
}

fn section(e: &SExpr) -> Result<(&str, &[SExpr])> {
    let items = list(e, "a section")?;
    let key = items.first().and_then(|k| k.as_atom()).filter(|k| k.starts_with(':'));
    match key {
        Some(k) => Ok((k, items)),
        None => Err(HddlError::syntax(e.pos(), "expected a `(:section ...)`")),
    }
}

pub fn parse_domain(text: &str) -> Result<DomainAst> {
    let exprs = read(text)?;
    let (sections, dname) = define("domain", &exprs)?;
    let mut domain = DomainAst { name: dname, ..DomainAst::default() };
    let mut schemas = Vec::new();
    let mut constants_pos = Pos::default();
    for s in sections {
        let (key, items) = section(s)?;
        match key {
            ":requirements" => {
                for r in &items[1..] {
                    domain.requirements.push(atom(r, "a requirement")?.to_string());
                }
            }
            ":types" => {
                for t in typed_names(&items[1..], false)? {
                    if t.name == "object" || domain.types.iter().any(|u| u.name == t.name) {
                        return Err(HddlError::invalid(s.pos(), format!("type `{}` declared twice", t.name)));
                    }
                    domain.types.push(t);
                }
            }
            ":constants" => {
                constants_pos = s.pos();
                domain.constants.extend(typed_names(&items[1..], false)?);
            }
            ":predicates" => {
                for p in &items[1..] {
                    let pi = list(p, "a predicate")?;
                    let pname = name(pi.first().ok_or_else(|| HddlError::syntax(p.pos(), "empty predicate"))?, "predicate")?;
                    if domain.predicate(&pname).is_some() {
                        return Err(HddlError::invalid(p.pos(), format!("predicate `{pname}` declared twice")));
                    }
                    let params = typed_names(&pi[1..], true)?;
                    domain.predicates.push(Signature { name: pname, params });
                }
            }
            ":task" => {
                let tname = name(items.get(1).ok_or_else(|| HddlError::syntax(s.pos(), "task without a name"))?, "task")?;
                let mut params = vec![];
                for (k, v) in keywords(items, 2)? {
                    match k {
                        ":parameters" => params = typed_names(list(v, "parameters")?, true)?,
                        _ => return Err(HddlError::unsupported(v.pos(), format!("`{k}` in a task"))),
                    }
                }
                if domain.task_arity(&tname).is_some() {
                    return Err(HddlError::invalid(s.pos(), format!("task `{tname}` declared twice")));
                }
                domain.tasks.push(Signature { name: tname, params });
            }
            ":action" | ":durative-action" | ":method" => schemas.push((key, items, s.pos())),
            _ => return Err(HddlError::unsupported(s.pos(), format!("section `{key}`"))),
        }
    }
    for t in &domain.types {
        if t.ty != "object" && !domain.types.iter().any(|u| u.name == t.ty) {
            return Err(HddlError::invalid(Pos::default(), format!("undeclared type `{}` (parent of `{}`)", t.ty, t.name)));
        }
        if !domain.is_subtype(&t.name, "object") {
            return Err(HddlError::invalid(Pos::default(), format!("type `{}` has a cyclic hierarchy", t.name)));
        }
    }
    let mut checker = Checker { domain: &domain, objects: HashSet::new() };
    checker.check_types(&domain.constants, constants_pos)?;
    for sig in domain.predicates.iter().chain(&domain.tasks) {
        checker.check_types(&sig.params, Pos::default())?;
    }
    checker.objects = domain.constants.iter().map(|c| c.name.clone()).collect();

    // Action names must be known before methods refer to them.
    let mut actions = Vec::new();
    let mut durative = Vec::new();
    let mut stub = domain.clone();
    for &(key, items, pos) in &schemas {
        let n = items.get(1).and_then(|e| e.as_atom()).unwrap_or_default().to_string();
        if stub.task_arity(&n).is_some() {
            return Err(HddlError::invalid(pos, format!("`{n}` declared twice")));
        }
        let arity_only = typed_names(
            keywords(items, 2)?.iter().find(|k| k.0 == ":parameters").map_or(Ok(&[][..]), |k| list(k.1, "parameters"))?,
            true,
        )?;
        match key {
            ":action" => stub.actions.push(ActionAst { name: n, params: arity_only, pre: vec![], effects: EffectsAst::default() }),
            ":durative-action" => stub.durative_actions.push(DurativeActionAst {
                name: n,
                params: arity_only,
                duration: String::new(),
                at_start: vec![],
                over_all: vec![],
                at_end: vec![],
                start_effects: EffectsAst::default(),
                end_effects: EffectsAst::default(),
            }),
            _ => {}
        }
    }
    checker.domain = &stub;
    let mut methods = Vec::new();
    for &(key, items, pos) in &schemas {
        match key {
            ":action" => actions.push(checker.action(items, pos)?),
            ":durative-action" => durative.push(checker.durative_action(items, pos)?),
            _ => methods.push(checker.method(items, pos)?),
        }
    }
    domain.actions = actions;
    domain.durative_actions = durative;
    domain.methods = methods;
    Ok(domain)
}

pub fn parse_problem(text: &str, domain: &DomainAst) -> Result<ProblemAst> {
    let exprs = read(text)?;
    let (sections, pname) = define("problem", &exprs)?;
    let mut problem = ProblemAst { name: pname, ..ProblemAst::default() };
    let mut checker = Checker { domain, objects: domain.constants.iter().map(|c| c.name.clone()).collect() };
    let mut later = Vec::new();
    for s in sections {
        let (key, items) = section(s)?;
        match key {
            ":domain" => {
                let d = name(items.get(1).ok_or_else(|| HddlError::syntax(s.pos(), "missing domain name"))?, "domain")?;
                if d != domain.name {
                    log::warn!("problem `{}` names domain `{d}`, loaded domain is `{}`", problem.name, domain.name);
                }
                problem.domain = d;
            }
            ":objects" => {
                let objects = typed_names(&items[1..], false)?;
                checker.check_types(&objects, s.pos())?;
                for o in &objects {
                    if !checker.objects.insert(o.name.clone()) {
                        return Err(HddlError::invalid(s.pos(), format!("object `{}` declared twice", o.name)));
                    }
                }
                problem.objects.extend(objects);
            }
            ":requirements" => {}
            ":init" | ":goal" | ":htn" => later.push((key, items, s.pos())),
            _ => return Err(HddlError::unsupported(s.pos(), format!("section `{key}`"))),
        }
    }
    let scope = checker.scope(&[]);
    for (key, items, pos) in later {
        match key {
            ":init" => {
                for a in &items[1..] {
                    problem.init.push(checker.proposition(a, &scope)?);
                }
            }
            ":goal" => {
                let [_, g] = items else { return Err(HddlError::syntax(pos, "`:goal` takes one condition")) };
                for c in conjuncts(g)? {
                    problem.goal.push(checker.proposition(c, &scope)?);
                }
            }
            _ => {
                let kw = keywords(items, 1)?;
                for &(k, v) in &kw {
                    match k {
                        ":parameters" if list(v, "parameters")?.is_empty() => {}
                        ":parameters" => return Err(HddlError::unsupported(v.pos(), "parameters of the initial task network")),
                        ":subtasks" | ":tasks" | ":ordered-subtasks" | ":ordered-tasks" | ":ordering" | ":constraints" => {}
                        _ => return Err(HddlError::unsupported(v.pos(), format!("`{k}` in `:htn`"))),
                    }
                }
                problem.htn = checker.network(&kw, &scope)?;
            }
        }
    }
    Ok(problem)
}
