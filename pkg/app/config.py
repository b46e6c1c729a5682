from pydantic_settings import BaseSettings
from pydantic import ConfigDict


class Settings(BaseSettings):
    """Application settings"""

    # Corpus Configuration
    corpus_root: str = "corpus"  # 语料根目录 (geometry / surfaces / certs / scope)

    # Oracle Configuration
    oracle_samples: int = 25  # 每个 chamber 的采样点数
    oracle_seed: int = 7  # 随机种子, 固定以保证可复现
    oracle_max_denominator: int = 97  # 采样有理点的最大分母

    # Verify Configuration
    verify_workers: int = 4  # 并发校验证书的线程数, 1 表示顺序执行

    # Output Configuration
    output_format: str = "table"  # table 或 machine (key=value 行)

    model_config = ConfigDict(env_file=".env", case_sensitive=False)
    # Logging Configuration
    log_level: str = "WARNING"


settings = Settings()
