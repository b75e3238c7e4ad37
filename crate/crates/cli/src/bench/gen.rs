//! Deterministic benchmark generators.
//!
//! Each generator materializes, for a scale factor `n`, an initial
//! program with unit tests plus two fragment library variants: one
//! whose holes carry name patterns and one with plain holes. Identical
//! `(name, n)` inputs produce byte-identical sources.

use anyhow::{bail, Result};

pub const NAMES: [&str; 8] = [
    "factory",
    "singleton",
    "accessor",
    "observer",
    "builder",
    "virtualproxy",
    "adapter",
    "composite",
];

#[derive(Clone, Debug)]
pub struct GeneratedCase {
    pub name: String,
    pub scale: u32,
    pub task: String,
    /// `(file name, source)` pairs, patterned holes.
    pub library: Vec<(String, String)>,
    /// Same fragments with every pattern hole demoted to a plain hole.
    pub library_plain: Vec<(String, String)>,
    pub tests: u32,
}

pub fn generate(name: &str, n: u32) -> Result<GeneratedCase> {
    if n == 0 {
        bail!("scale must be at least 1");
    }
    let (task, lib): (String, fn(u32, bool) -> Vec<(String, String)>) = match name {
        "factory" => (factory_task(n), factory_lib),
        "singleton" => (singleton_task(n), singleton_lib),
        "accessor" => (accessor_task(n), accessor_lib),
        "observer" => (observer_task(n), observer_lib),
        "builder" => (builder_task(n), builder_lib),
        "virtualproxy" => (virtualproxy_task(n), virtualproxy_lib),
        "adapter" => (adapter_task(n), adapter_lib),
        "composite" => (composite_task(n), composite_lib),
        other => bail!("unknown benchmark `{other}`"),
    };
    Ok(GeneratedCase {
        name: name.to_owned(),
        scale: n,
        task,
        library: lib(n, true),
        library_plain: lib(n, false),
        tests: n,
    })
}

/// A name hole: the given pattern when patterned, a plain labeled hole
/// otherwise.
fn hole(patterned: bool, pattern: &str, plain: &str) -> String {
    if patterned {
        format!("?{{{pattern}}}")
    } else {
        format!("?{plain}")
    }
}

// --- factory ------------------------------------------------------------
//
// n product classes behind a shared `Product` interface. The search
// must invent one concrete factory per product plus the abstract
// factory interface they implement; the open choice is which product
// each factory instantiates.

fn factory_task(n: u32) -> String {
    let mut s = String::new();
    s.push_str("interface Product {\n    String tag();\n}\n");
    for i in 0..n {
        s.push_str(&format!(
            "\nclass Product{i} implements Product {{\n    Product{i}() {{ }}\n    String tag() {{\n        return \"p{i}\";\n    }}\n}}\n"
        ));
    }
    s.push_str("\nclass FactoryTests {\n");
    for i in 0..n {
        s.push_str(&format!(
            "    @Test\n    static void testCreate{i}() {{\n        AbstractFactory f = new Factory{i}();\n        Product{i} p = (Product{i}) f.create();\n        assert(p.tag().equals(\"p{i}\"));\n    }}\n"
        ));
    }
    s.push_str("}\n");
    s
}

fn factory_lib(_n: u32, p: bool) -> Vec<(String, String)> {
    let product = hole(p, "(product)(?)", "P");
    let fclass = format!(
        "@TypeFragment\nclass {} implements {} {{\n    {product} create() {{\n        return new {product}();\n    }}\n}}\n",
        hole(p, "(?)(factory)(?)", "F"),
        hole(p, "(abstract)(?)", "A"),
    );
    let aiface = String::from(
        "@TypeFragment\ninterface AbstractFactory {\n    Product create();\n}\n",
    );
    // A lookalike that forgets to build anything; names are the only
    // way to rule it out without running the tests.
    let supplier = format!(
        "@TypeFragment\nclass {} implements {} {{\n    Product create() {{\n        return null;\n    }}\n}}\n",
        hole(p, "(?)(supplier)(?)", "S"),
        hole(p, "(abstract)(?)", "A"),
    );
    vec![
        ("abstract_factory.lm".to_owned(), aiface),
        ("concrete_factory.lm".to_owned(), fclass),
        ("null_supplier.lm".to_owned(), supplier),
    ]
}

// --- singleton ----------------------------------------------------------
//
// Each of n classes gains a `_instance` field and an accessor that
// constructs the instance on first use. Both fragment holes are bound
// directly by the member goal, so the search never branches.

fn singleton_task(n: u32) -> String {
    let mut s = String::new();
    for i in 0..n {
        s.push_str(&format!("class Service{i} {{\n    Service{i}() {{ }}\n}}\n\n"));
    }
    s.push_str("class SingletonTests {\n");
    for i in 0..n {
        s.push_str(&format!(
            "    @Test\n    static void testShared{i}() {{\n        Service{i} s = new Service{i}();\n        Service{i} a = s.instance();\n        Service{i} b = s.instance();\n        assert(a == b);\n    }}\n"
        ));
    }
    s.push_str("}\n");
    s
}

fn singleton_lib(_n: u32, p: bool) -> Vec<(String, String)> {
    let field = String::from("@MemberFragment\nclass ?C {\n    ?C _instance;\n}\n");
    let method = format!(
        "@MemberFragment\nclass ?C {{\n    ?C {}() {{\n        if (this._instance == null) {{\n            this._instance = new ?C();\n        }}\n        return this._instance;\n    }}\n}}\n",
        hole(p, "(?)(instance)(?)", "m"),
    );
    vec![
        ("instance_field.lm".to_owned(), field),
        ("instance_method.lm".to_owned(), method),
    ]
}

// --- accessor -----------------------------------------------------------
//
// One class, n same-typed fields, a setter/getter pair per field. With
// plain holes every setter and getter independently picks any of the n
// fields; name patterns force the matching field.

fn accessor_task(n: u32) -> String {
    let mut s = String::new();
    s.push_str("class Box {\n");
    for i in 0..n {
        s.push_str(&format!("    Integer v{i};\n"));
    }
    s.push_str("}\n\nclass BoxTests {\n");
    for i in 0..n {
        s.push_str(&format!(
            "    @Test\n    static void testAccess{i}() {{\n        Box b = new Box();\n        b.setV{i}(7);\n        assert(b.v{i} == 7);\n        assert(b.getV{i}() == 7);\n    }}\n"
        ));
    }
    s.push_str("}\n");
    s
}

fn accessor_lib(_n: u32, p: bool) -> Vec<(String, String)> {
    let setter = format!(
        "@MemberFragment\nclass ?S {{\n    void {}(Integer v) {{\n        this.?f = v;\n    }}\n}}\n",
        hole(p, "(set)(?f)", "m"),
    );
    let getter = format!(
        "@MemberFragment\nclass ?S {{\n    Integer {}() {{\n        return this.?f;\n    }}\n}}\n",
        hole(p, "(get)(?f)", "m"),
    );
    vec![("getter.lm".to_owned(), getter), ("setter.lm".to_owned(), setter)]
}

// --- observer -----------------------------------------------------------
//
// A subject with n observed fields. The search adds the three observer
// management helpers and one notifying setter per field; each setter
// must also pick the right handler out of n + 2 equally typed options,
// which only the tests distinguish.

fn observer_task(n: u32) -> String {
    let mut s = String::new();
    s.push_str("class Logger {\n    String log;\n    Logger() {\n        this.log = \"\";\n    }\n");
    for i in 0..n {
        s.push_str(&format!(
            "    void onUpdate{i}(Integer v) {{\n        this.log = this.log.concat(\"u{i}:\").concat(v.toString());\n    }}\n"
        ));
    }
    s.push_str("    String getLogEntry(Integer i) {\n        return this.log;\n    }\n");
    s.push_str("    void clearLog(Integer i) {\n        this.log = \"\";\n    }\n}\n\n");
    s.push_str("class Canvas {\n");
    for i in 0..n {
        s.push_str(&format!("    Integer brush{i};\n"));
    }
    s.push_str("    List loggers;\n    Canvas() {\n        this.loggers = new List();\n    }\n}\n\n");
    s.push_str("class CanvasTests {\n");
    for i in 0..n {
        s.push_str(&format!(
            "    @Test\n    static void testSet{i}() {{\n        Canvas c = new Canvas();\n        Logger l = new Logger();\n        c.registerLogger(l);\n        assert(c.numLoggers() == 1);\n        assert(c.getLogger(0) == l);\n        c.setBrush{i}(10);\n        assert(c.brush{i} == 10);\n        assert(l.log.contains(\"u{i}:10\"));\n    }}\n"
        ));
    }
    s.push_str("}\n");
    s
}

fn observer_lib(_n: u32, p: bool) -> Vec<(String, String)> {
    let register = format!(
        "@MemberFragment\nclass ?S {{\n    void {}(Object o) {{\n        this.{}.add(o);\n    }}\n}}\n",
        hole(p, "(register)(?)", "m"),
        hole(p, "(loggers)", "lst"),
    );
    let count = format!(
        "@MemberFragment\nclass ?S {{\n    Integer {}() {{\n        return this.{}.size();\n    }}\n}}\n",
        hole(p, "(num)(?)", "m"),
        hole(p, "(loggers)", "lst"),
    );
    let get = format!(
        "@MemberFragment\nclass ?S {{\n    Object {}(Integer i) {{\n        return this.{}.get(i);\n    }}\n}}\n",
        hole(p, "(get)(?)", "m"),
        hole(p, "(loggers)", "lst"),
    );
    // The handler hole stays plain in both variants: choosing the
    // handler is the part of this benchmark only tests can decide.
    let setter = format!(
        "@MemberFragment\nclass ?S {{\n    void {}(Integer newValue) {{\n        this.?f = newValue;\n        Integer i = 0;\n        while (i < this.{}()) {{\n            Logger o = (Logger) this.{}(i);\n            o.?notify(newValue);\n            i = i + 1;\n        }}\n    }}\n}}\n",
        hole(p, "(set)(?f)", "m"),
        hole(p, "(num)(?)", "num"),
        hole(p, "(get)(?)", "getter"),
    );
    vec![
        ("count.lm".to_owned(), count),
        ("get.lm".to_owned(), get),
        ("register.lm".to_owned(), register),
        ("setter.lm".to_owned(), setter),
    ]
}

// --- builder ------------------------------------------------------------
//
// A product class with n constructor parameters. The search invents a
// builder class with one buffer field per parameter, a setter per
// field, and a build method whose n argument holes must be wired to
// the right fields — the choice that makes this benchmark grow.

fn builder_task(n: u32) -> String {
    let mut s = String::new();
    s.push_str("class Widget {\n");
    for i in 0..n {
        s.push_str(&format!("    Integer p{i};\n"));
    }
    let params: Vec<String> = (0..n).map(|i| format!("Integer a{i}")).collect();
    s.push_str(&format!("    Widget({}) {{\n", params.join(", ")));
    for i in 0..n {
        s.push_str(&format!("        this.p{i} = a{i};\n"));
    }
    s.push_str("    }\n}\n\nclass BuilderTests {\n");
    for i in 0..n {
        s.push_str(&format!(
            "    @Test\n    static void testBuild{i}() {{\n        WidgetBuilder b = new WidgetBuilder();\n        b.setP{i}(7);\n        Widget w = b.build();\n        assert(w.p{i} == 7);\n    }}\n"
        ));
    }
    s.push_str("}\n");
    s
}

fn builder_lib(n: u32, p: bool) -> Vec<(String, String)> {
    let mut class = format!("@TypeFragment\nclass {} {{\n", hole(p, "(?)(builder)(?)", "B"));
    for i in 0..n {
        class.push_str(&format!("    Integer p{i};\n"));
    }
    class.push_str("}\n");
    let setter = format!(
        "@MemberFragment\nclass ?B {{\n    void {}(Integer v) {{\n        this.?f = v;\n    }}\n}}\n",
        hole(p, "(set)(?f)", "m"),
    );
    // Argument order is invisible to types and names alike; the ?a
    // holes stay plain in both variants.
    let args: Vec<String> = (0..n).map(|i| format!("this.?a{i}")).collect();
    let build = format!(
        "@MemberFragment\nclass ?B {{\n    Widget {}() {{\n        return new Widget({});\n    }}\n}}\n",
        hole(p, "(build)(?)", "m"),
        args.join(", "),
    );
    vec![
        ("build.lm".to_owned(), build),
        ("builder_class.lm".to_owned(), class),
        ("setter.lm".to_owned(), setter),
    ]
}

// --- virtualproxy -------------------------------------------------------
//
// A subject with n methods; the proxy mirrors each one, constructing
// the wrapped object on first use. The only free choice is the wrapped
// type, and the proxy's own class is the one wrong well-typed answer.

fn virtualproxy_task(n: u32) -> String {
    let mut s = String::new();
    s.push_str("class Image {\n    Image() { }\n");
    for i in 0..n {
        s.push_str(&format!(
            "    Integer op{i}(Integer x) {{\n        return x + {i};\n    }}\n"
        ));
    }
    s.push_str("}\n\nclass ProxyTests {\n");
    for i in 0..n {
        s.push_str(&format!(
            "    @Test\n    static void testOp{i}() {{\n        ImageProxy p = new ImageProxy();\n        assert(p.op{i}(5) == {});\n        assert(p.op{i}(6) == {});\n    }}\n",
            5 + i,
            6 + i,
        ));
    }
    s.push_str("}\n");
    s
}

fn virtualproxy_lib(n: u32, p: bool) -> Vec<(String, String)> {
    let class = format!(
        "@TypeFragment\nclass {} {{\n    ?T inner;\n    Integer hits;\n}}\n",
        hole(p, "(?)(proxy)(?)", "F"),
    );
    let mut out = vec![("proxy_class.lm".to_owned(), class)];
    for i in 0..n {
        let method = format!(
            "@MemberFragment\nclass ?P {{\n    Integer op{i}(Integer x) {{\n        if (this.inner == null) {{\n            this.inner = new ?T();\n        }}\n        this.hits = this.hits + 1;\n        ?T target = this.inner;\n        return target.op{i}(x);\n    }}\n}}\n"
        );
        out.push((format!("proxy_op{i}.lm"), method));
    }
    out
}

// --- adapter ------------------------------------------------------------
//
// The adaptee's methods do what the target interface wants under
// different names of identical shape; each adapter method must find
// the handler whose behavior satisfies the tests.

fn adapter_task(n: u32) -> String {
    let mut s = String::new();
    s.push_str("interface Target {\n");
    for i in 0..n {
        s.push_str(&format!("    Integer request{i}(Integer x);\n"));
    }
    s.push_str("}\n\nclass Legacy {\n    Legacy() { }\n");
    for i in 0..n {
        s.push_str(&format!(
            "    Integer handle{i}(Integer x) {{\n        return x + {i};\n    }}\n"
        ));
    }
    s.push_str("}\n\nclass AdapterTests {\n");
    for i in 0..n {
        s.push_str(&format!(
            "    @Test\n    static void testAdapt{i}() {{\n        Target t = new LegacyAdapter();\n        assert(t.request{i}(5) == {});\n    }}\n",
            5 + i,
        ));
    }
    s.push_str("}\n");
    s
}

fn adapter_lib(_n: u32, p: bool) -> Vec<(String, String)> {
    let class = format!(
        "@TypeFragment\nclass {} implements {} {{\n    ?W wrapped;\n}}\n",
        hole(p, "(?)(adapter)(?)", "F"),
        hole(p, "(?)(target)(?)", "I"),
    );
    let method = format!(
        "@MemberFragment\nclass ?A {{\n    Integer {}(Integer x) {{\n        if (this.wrapped == null) {{\n            this.wrapped = new ?W();\n        }}\n        return this.wrapped.{}(x);\n    }}\n}}\n",
        hole(p, "(request)(?)", "m"),
        hole(p, "(handle)(?)", "h"),
    );
    vec![
        ("adapter_class.lm".to_owned(), class),
        ("adapter_method.lm".to_owned(), method),
    ]
}

// --- composite ----------------------------------------------------------
//
// n leaf and n branch classes already declare the shared interface;
// the search must invent that interface and a `total` implementation
// per class, picking the summed fields at each branch.

fn composite_task(n: u32) -> String {
    let mut s = String::new();
    for i in 0..n {
        s.push_str(&format!(
            "class Leaf{i} implements Component {{\n    Integer weight;\n    Integer id;\n    Leaf{i}(Integer w) {{\n        this.weight = w;\n        this.id = 9;\n    }}\n}}\n\n"
        ));
    }
    for i in 0..n {
        s.push_str(&format!(
            "class Branch{i} implements Component {{\n    Component left;\n    Component right;\n    Branch{i}(Component l, Component r) {{\n        this.left = l;\n        this.right = r;\n    }}\n}}\n\n"
        ));
    }
    s.push_str("class CompositeTests {\n");
    for i in 0..n {
        let other = (i + 1) % n;
        s.push_str(&format!(
            "    @Test\n    static void testSum{i}() {{\n        Component t = new Branch{i}(new Leaf{i}(2), new Leaf{other}(3));\n        assert(t.total() == 5);\n    }}\n"
        ));
    }
    s.push_str("}\n");
    s
}

fn composite_lib(_n: u32, p: bool) -> Vec<(String, String)> {
    let iface = format!(
        "@TypeFragment\ninterface {} {{\n    Integer total();\n}}\n",
        hole(p, "(?)(component)(?)", "I"),
    );
    let leaf = format!(
        "@MemberFragment\nclass ?C {{\n    Integer {}() {{\n        return this.{};\n    }}\n}}\n",
        hole(p, "(total)(?)", "m"),
        hole(p, "(weight)", "f"),
    );
    let branch = format!(
        "@MemberFragment\nclass ?C {{\n    Integer {}() {{\n        return this.{}.total() + this.{}.total();\n    }}\n}}\n",
        hole(p, "(total)(?)", "m"),
        hole(p, "(left)", "a"),
        hole(p, "(right)", "b"),
    );
    vec![
        ("branch_total.lm".to_owned(), branch),
        ("component.lm".to_owned(), iface),
        ("leaf_total.lm".to_owned(), leaf),
    ]
}
