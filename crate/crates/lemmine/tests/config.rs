use std::path::PathBuf;
use std::time::Duration;

use lemmine::config::Config;
use lemmine::AppError;

fn config_error(text: &str) -> String {
    match Config::parse(text) {
        Err(AppError::Config(m)) => m,
        other => panic!("expected a configuration error, got {other:?}"),
    }
}

#[test]
fn defaults_follow_the_evaluation_setup() {
    let c = Config::default();
    let b = c.budget();
    assert_eq!(b.timeout, Duration::from_secs(30));
    assert_eq!((b.bmc_bound, b.k), (30, 1));
    assert_eq!(c.prompting.fewshot, 1);
    assert_eq!(c.prompting.samples, 5);
    assert_eq!(c.templates.max_literals, 2);
    assert_eq!(c.llm.max_tokens, None);
    assert_eq!(c.llm.api_key_env, "LEMMINE_API_KEY");
    assert_eq!(Config::parse("").unwrap(), c);
}

#[test]
fn full_file_parses() {
    let c = Config::parse(
        r#"
        [solver]
        external_path = "/opt/kissat"
        args = ["-q"]
        timeout_secs = 2.5

        [checker]
        bmc_bound = 12
        k = 2
        depth_cap = 3

        [prompting]
        fewshot = 2
        samples = 4

        [templates]
        max_literals = 1
        include_implications = true

        [llm]
        base_url = "http://localhost:8000/v1"
        model = "m"
        api_key_env = "MY_KEY"
        max_tokens = 4096
        sampling = { temperature = 0.2, top_p = 1 }
        headers = { "x-api-key" = "{key}" }

        [embedding]
        url = "http://localhost:8001/embeddings"
        model = "e"

        [suite]
        workers = 3
        "#,
    )
    .unwrap();
    assert_eq!(c.solver.external_path, Some(PathBuf::from("/opt/kissat")));
    assert_eq!(c.budget().timeout, Duration::from_millis(2500));
    assert_eq!((c.checker.bmc_bound, c.checker.k, c.checker.depth_cap), (12, 2, 3));
    assert_eq!(c.templates.max_literals, 1);
    assert!(c.templates.include_implications);
    assert_eq!(c.llm.max_tokens, Some(4096));
    assert_eq!(c.llm.sampling["temperature"], serde_json::json!(0.2));
    assert_eq!(c.embedding.unwrap().model, "e");
    assert_eq!(c.suite.workers, 3);
}

#[test]
fn credentials_are_refused_in_the_file() {
    for text in [
        "[llm]\napi_key = \"sk-123\"",
        "[llm]\ntoken = \"abc\"",
        "[embedding]\nurl = \"u\"\nmodel = \"m\"\nsecret = \"s\"",
        "password = \"p\"",
        "[llm]\nheaders = { Authorization = \"Bearer sk-123\" }",
        "[llm]\nheaders = { \"x-api-key\" = \"sk-123\" }",
    ] {
        let m = config_error(text);
        assert!(m.contains("credential"), "{text}: {m}");
    }
    assert!(Config::parse("[llm]\napi_key_env = \"K\"\nmax_tokens = 10").is_ok());
}

#[test]
fn unknown_keys_and_bad_values_are_rejected() {
    assert!(config_error("[checker]\nbound = 3").contains("bound"));
    assert!(config_error("[checker]\nbmc_bound = 0").contains("bmc_bound"));
    assert!(config_error("[checker]\nk = 0").contains("k"));
    assert!(config_error("[solver]\ntimeout_secs = 0").contains("timeout"));
    assert!(config_error("[prompting]\nsamples = 0").contains("samples"));
    config_error("[checker\n");
}

#[test]
fn relative_paths_follow_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lemmine.toml");
    std::fs::write(&path, "[prompting]\ntemplate_file = \"t.txt\"\npool_dir = \"/abs/pool\"").unwrap();
    let c = Config::load(&path).unwrap();
    assert_eq!(c.prompting.template_file, Some(dir.path().join("t.txt")));
    assert_eq!(c.prompting.pool_dir, Some(PathBuf::from("/abs/pool")));
    assert!(matches!(Config::load(&dir.path().join("missing.toml")), Err(AppError::Config(_))));
}
