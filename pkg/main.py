# main.py
"""
@file: main.py
@description: Точка входа: проверка зависимостей и запуск командной строки
@dependencies: cli
@created: 2024-12-19
"""

import sys


def check_dependencies():
    """Проверяет доступность зависимостей"""
    missing_deps = []

    try:
        import numpy
    except ImportError:
        missing_deps.append("numpy")

    try:
        import scipy
    except ImportError:
        missing_deps.append("scipy")

    try:
        import yaml
    except ImportError:
        missing_deps.append("PyYAML")

    if missing_deps:
        print("❌ Отсутствуют зависимости:", file=sys.stderr)
        for dep in missing_deps:
            print(f"   - {dep}", file=sys.stderr)
        print("\nУстановите зависимости:", file=sys.stderr)
        print("pip install -r requirements.txt", file=sys.stderr)
        return False

    return True


def main(argv=None):
    """Главная функция приложения"""
    if not check_dependencies():
        return 2

    from cli import main as cli_main
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
